#include <catch2/catch_amalgamated.hpp>

#include "test_support.hpp"

using namespace moranfrac;
using Catch::Approx;

TEST_CASE("parse_config reads a multi-pattern document") {
    const Config cfg = mftest::load_corpus("eg3.json");
    REQUIRE(cfg.system.size() == 3);
    CHECK(cfg.system.patterns[0].name == "D3");
    CHECK(cfg.system.patterns[1].n == 3);
    CHECK(cfg.system.patterns[1].m == 4);
    CHECK(cfg.system.patterns[0].digits[2] == Digit{1, 4});
    BigRat total = 0;
    for (const BigRat& f : cfg.system.frequencies) total += f;
    CHECK(total == 1);
    CHECK(cfg.system.frequencies[2] == BigRat(3, 5));
}

TEST_CASE("minimal single-pattern config parses") {
    const std::string text = R"({
      "patterns": [{"name": "P", "n": 2, "m": 2, "digits": [[0,0],[1,1]], "probs": [0.5, 0.5]}],
      "frequencies": {"P": [1, 1]}
    })";
    const Config cfg = parse_config(text);
    REQUIRE(cfg.system.size() == 1);
    CHECK(validate_system(cfg.system).ok);
}

TEST_CASE("schema violations raise ConfigError") {
    CHECK_THROWS_AS(parse_config("not json"), ConfigError);
    // duplicate name
    CHECK_THROWS_AS(parse_config(R"({
      "patterns": [
        {"name": "P", "n": 2, "m": 2, "digits": [[0,0],[1,1]], "probs": [0.5,0.5]},
        {"name": "P", "n": 2, "m": 2, "digits": [[0,0],[1,1]], "probs": [0.5,0.5]}],
      "frequencies": {"P": [1, 1]}
    })"),
                    ConfigError);
    // zero denominator
    CHECK_THROWS_AS(parse_config(R"({
      "patterns": [{"name": "P", "n": 2, "m": 2, "digits": [[0,0],[1,1]], "probs": [0.5,0.5]}],
      "frequencies": {"P": [1, 0]}
    })"),
                    ConfigError);
    // unknown name in frequencies
    CHECK_THROWS_AS(parse_config(R"({
      "patterns": [{"name": "P", "n": 2, "m": 2, "digits": [[0,0],[1,1]], "probs": [0.5,0.5]}],
      "frequencies": {"P": [1, 2], "Q": [1, 2]}
    })"),
                    ConfigError);
}

TEST_CASE("probability sum violations are validation errors") {
    const Config cfg = parse_config(R"({
      "patterns": [{"name": "P", "n": 2, "m": 2, "digits": [[0,0],[1,1]], "probs": [0.5, 0.6]}],
      "frequencies": {"P": [1, 1]}
    })");
    const ValidationReport rep = validate_system(cfg.system);
    CHECK_FALSE(rep.ok);
    bool found = false;
    for (const Message& m : rep.messages)
        if (m.severity == Severity::error && m.text.find("does not sum to 1") != std::string::npos)
            found = true;
    CHECK(found);
}

TEST_CASE("validation flags the standing assumptions") {
    SECTION("single digit violates r >= 2") {
        auto sys = mftest::single(3, 3, {{0, 0}}, {1.0});
        const auto rep = validate_system(sys);
        CHECK_FALSE(rep.ok);
        bool found = false;
        for (const Message& m : rep.messages)
            if (m.text.find("r >= 2") != std::string::npos) found = true;
        CHECK(found);
    }
    SECTION("digit out of range") {
        auto sys = mftest::single(4, 5, {{4, 1}, {0, 0}}, {0.5, 0.5});
        const auto rep = validate_system(sys);
        CHECK_FALSE(rep.ok);
        bool found = false;
        for (const Message& m : rep.messages)
            if (m.text.find("out of range") != std::string::npos) found = true;
        CHECK(found);
    }
    SECTION("repeated digit") {
        auto sys = mftest::single(3, 3, {{0, 0}, {0, 0}}, {0.5, 0.5});
        CHECK_FALSE(validate_system(sys).ok);
    }
    SECTION("n or m below 2") {
        auto sys = mftest::single(1, 3, {{0, 0}, {0, 2}}, {0.5, 0.5});
        CHECK_FALSE(validate_system(sys).ok);
    }
    SECTION("non-positive probability") {
        auto sys = mftest::single(3, 3, {{0, 0}, {1, 1}}, {1.0, 0.0});
        CHECK_FALSE(validate_system(sys).ok);
    }
    SECTION("frequencies must sum to 1 exactly") {
        auto sys = mftest::carpet32();
        sys.frequencies = {BigRat(1, 2)};
        CHECK_FALSE(validate_system(sys).ok);
    }
}

TEST_CASE("warnings do not block validation") {
    PatternSystem sys = mftest::load_corpus("eg1.json").system;
    sys.frequencies = {BigRat(0), BigRat(3, 4), BigRat(1, 4)};  // f = 0 pattern
    const ValidationReport rep = validate_system(sys);
    CHECK(rep.ok);
    bool warned = false;
    for (const Message& m : rep.messages)
        if (m.severity == Severity::warning && m.text.find("frequency 0") != std::string::npos)
            warned = true;
    CHECK(warned);
}

TEST_CASE("validation fills derived fields") {
    const Config cfg = mftest::load_corpus("eg3.json");
    const auto rep = validate_system(cfg.system);
    REQUIRE(rep.ok);
    CHECK(rep.zeta_value == Approx(0.860).margin(5e-3));
    CHECK(rep.n_plus_value == 5);
    CHECK(rep.row_occupancy.at("D3") == std::map<int, int>{{0, 2}, {2, 2}, {4, 1}});
    CHECK(rep.col_occupancy.at("D3") == std::map<int, int>{{0, 1}, {1, 2}, {3, 2}});
}

TEST_CASE("zeta reproduces the worked examples") {
    CHECK(zeta(mftest::load_corpus("eg1.json").system) == Approx(0.9888).margin(5e-4));
    CHECK(zeta(mftest::load_corpus("eg1b.json").system) == Approx(1.090).margin(5e-3));
    CHECK(zeta(mftest::load_corpus("eg3.json").system) == Approx(0.860).margin(5e-3));
    // n = m forces zeta = 1
    CHECK(zeta(mftest::diagonal2()) == 1.0);
}

TEST_CASE("transpose is an involution and inverts zeta") {
    for (const char* name : {"eg1.json", "eg1b.json", "eg2.json", "eg3.json", "bm43.json"}) {
        const PatternSystem sys = mftest::load_corpus(name).system;
        const PatternSystem tt = transpose(transpose(sys));
        REQUIRE(tt.size() == sys.size());
        for (std::size_t g = 0; g < sys.size(); ++g) {
            CHECK(tt.patterns[g].n == sys.patterns[g].n);
            CHECK(tt.patterns[g].digits == sys.patterns[g].digits);
            CHECK(tt.patterns[g].probs == sys.patterns[g].probs);
        }
        CHECK(tt.orientation == sys.orientation);
        CHECK(zeta(transpose(sys)) * zeta(sys) == Approx(1.0).margin(1e-12));
    }
    CHECK(zeta(transpose(mftest::load_corpus("eg1b.json").system)) == Approx(0.917).margin(5e-3));
}

TEST_CASE("balanced sequence follows largest remainder") {
    const Config cfg = mftest::load_corpus("eg3.json");  // f = (1/5, 1/5, 3/5)
    const PatternSequence seq = make_sequence(cfg);
    std::vector<int> counts(3, 0);
    for (int g : seq.prefix(10)) ++counts[g];
    CHECK(counts == std::vector<int>{2, 2, 6});
}

TEST_CASE("single-frequency system gives a constant sequence") {
    const PatternSequence seq = realize_sequence(mftest::carpet32(), SequenceMode::balanced);
    for (int g : seq.prefix(25)) CHECK(g == 0);
}

TEST_CASE("balanced discrepancy stays within card(Gamma)") {
    const Config cfg = mftest::load_corpus("eg1.json");  // f = (1/4, 1/2, 1/4)
    const PatternSequence seq = make_sequence(cfg);
    const std::size_t N = 100000;
    const auto levels = seq.prefix(N);
    std::vector<double> f;
    for (std::size_t g = 0; g < cfg.system.size(); ++g) f.push_back(cfg.system.freq(g));
    std::vector<long> counts(cfg.system.size(), 0);
    double worst = 0.0;
    for (std::size_t n = 1; n <= N; ++n) {
        ++counts[levels[n - 1]];
        for (std::size_t g = 0; g < counts.size(); ++g)
            worst = std::max(worst, std::abs(counts[g] - f[g] * static_cast<double>(n)));
    }
    CHECK(worst <= static_cast<double>(cfg.system.size()));
    // empirical frequencies at N within 1e-3
    const auto emp = empirical_frequencies(seq, 10000);
    for (std::size_t g = 0; g < cfg.system.size(); ++g)
        CHECK(emp.at(cfg.system.patterns[g].name) == Approx(f[g]).margin(1e-3));
}

TEST_CASE("explicit sequences cycle and report frequencies") {
    const Config cfg = mftest::load_corpus("periodic.json");
    const PatternSequence seq = make_sequence(cfg);
    CHECK(seq.prefix(4) == std::vector<int>{0, 1, 0, 1});
    const auto emp = empirical_frequencies(seq, 4);
    CHECK(emp.at("A") == 0.5);
    CHECK(emp.at("B") == 0.5);
    bool cycling_note = false;
    for (const Message& m : cfg.system.notes)
        if (m.text.find("cycle") != std::string::npos) cycling_note = true;
    CHECK(cycling_note);
    CHECK_THROWS_AS(realize_sequence(cfg.system, SequenceMode::explicit_levels, {"A", "missing"}),
                    DomainError);
}

TEST_CASE("constant sequence has empirical frequency 1") {
    const PatternSequence seq = realize_sequence(mftest::carpet32(), SequenceMode::balanced);
    CHECK(empirical_frequencies(seq, 7).at("C") == 1.0);
}

TEST_CASE("config round-trips through serialize/parse") {
    for (const char* name : {"eg1.json", "eg3.json", "periodic.json", "mcmullen32.json"}) {
        const Config cfg = mftest::load_corpus(name);
        const std::string text = serialize_config(cfg);
        const Config back = parse_config(text);
        REQUIRE(back.system.size() == cfg.system.size());
        for (std::size_t g = 0; g < cfg.system.size(); ++g) {
            CHECK(back.system.patterns[g].name == cfg.system.patterns[g].name);
            CHECK(back.system.patterns[g].n == cfg.system.patterns[g].n);
            CHECK(back.system.patterns[g].m == cfg.system.patterns[g].m);
            CHECK(back.system.patterns[g].digits == cfg.system.patterns[g].digits);
            CHECK(back.system.patterns[g].probs == cfg.system.patterns[g].probs);
            CHECK(back.system.frequencies[g] == cfg.system.frequencies[g]);
        }
        CHECK(back.mode == cfg.mode);
        CHECK(back.explicit_levels == cfg.explicit_levels);
        // serialized form is a fixed point
        CHECK(serialize_config(back) == text);
    }
}

TEST_CASE("near-1 probability sums are renormalized once with a note") {
    const std::string text = R"({
      "patterns": [{"name": "P", "n": 3, "m": 2, "digits": [[0,0],[1,1],[2,0]],
                    "probs": [0.33333333333333, 0.33333333333333, 0.33333333333333]}],
      "frequencies": {"P": [1, 1]}
    })";
    const Config cfg = parse_config(text);  // input sum is 1 - 1e-14
    double sum = 0.0;
    for (double p : cfg.system.patterns[0].probs) sum += p;
    CHECK(sum == Approx(1.0).margin(1e-15));
    bool renorm_note = false;
    for (const Message& m : cfg.system.notes)
        if (m.text.find("renormalized") != std::string::npos) renorm_note = true;
    CHECK(renorm_note);
    CHECK(validate_system(cfg.system).ok);
}
