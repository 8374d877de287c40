#ifndef MORANFRAC_IO_HPP
#define MORANFRAC_IO_HPP

#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "moranfrac/conditions.hpp"
#include "moranfrac/empirics.hpp"

namespace moranfrac {

inline constexpr const char* kVersion = "0.1.0";

using Json = nlohmann::json;

struct Config {
    PatternSystem system;
    SequenceMode mode = SequenceMode::balanced;
    std::vector<std::string> explicit_levels;
};

namespace detail {

inline std::size_t line_of_byte(const std::string& text, std::size_t byte) {
    std::size_t line = 1;
    for (std::size_t b = 0; b < byte && b < text.size(); ++b)
        if (text[b] == '\n') ++line;
    return line;
}

[[noreturn]] inline void schema_error(const std::string& path, const std::string& what) {
    throw ConfigError(ConfigError::Kind::schema, "config field '" + path + "': " + what);
}

inline std::string fmt17(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

}  // namespace detail

/// Parses the configuration document.  Structural problems raise
/// ConfigError; value-level invariant violations are left for
/// validate_system to report.  Probability vectors whose sum is within
/// 1e-12 of 1 are renormalized once, and the adjustment is noted.
inline Config parse_config(const std::string& text) {
    Json doc;
    try {
        doc = Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw ConfigError(ConfigError::Kind::parse,
                          "config parse error at line " +
                              std::to_string(detail::line_of_byte(text, e.byte)) + ": " +
                              e.what());
    }
    if (!doc.is_object()) detail::schema_error("(root)", "must be an object");
    if (!doc.contains("patterns") || !doc["patterns"].is_array() || doc["patterns"].empty())
        detail::schema_error("patterns", "must be a non-empty array");
    if (!doc.contains("frequencies") || !doc["frequencies"].is_object())
        detail::schema_error("frequencies", "must be an object of name -> [num, den]");

    Config cfg;
    for (std::size_t pi = 0; pi < doc["patterns"].size(); ++pi) {
        const Json& jp = doc["patterns"][pi];
        const std::string path = "patterns[" + std::to_string(pi) + "]";
        if (!jp.is_object()) detail::schema_error(path, "must be an object");
        Pattern p;
        if (!jp.contains("name") || !jp["name"].is_string() || jp["name"].get<std::string>().empty())
            detail::schema_error(path + ".name", "must be a non-empty string");
        p.name = jp["name"].get<std::string>();
        if (cfg.system.index_of(p.name) >= 0)
            detail::schema_error(path + ".name", "duplicate pattern name '" + p.name + "'");
        if (!jp.contains("n") || !jp["n"].is_number_integer())
            detail::schema_error(path + ".n", "must be an integer");
        if (!jp.contains("m") || !jp["m"].is_number_integer())
            detail::schema_error(path + ".m", "must be an integer");
        p.n = jp["n"].get<int>();
        p.m = jp["m"].get<int>();
        if (!jp.contains("digits") || !jp["digits"].is_array())
            detail::schema_error(path + ".digits", "must be an array of [i, j] pairs");
        for (const Json& jd : jp["digits"]) {
            if (!jd.is_array() || jd.size() != 2 || !jd[0].is_number_integer() ||
                !jd[1].is_number_integer())
                detail::schema_error(path + ".digits", "each digit must be an [i, j] integer pair");
            p.digits.push_back({jd[0].get<int>(), jd[1].get<int>()});
        }
        if (!jp.contains("probs") || !jp["probs"].is_array())
            detail::schema_error(path + ".probs", "must be an array of numbers");
        for (const Json& jq : jp["probs"]) {
            if (!jq.is_number()) detail::schema_error(path + ".probs", "entries must be numbers");
            p.probs.push_back(jq.get<double>());
        }
        if (p.probs.size() != p.digits.size())
            detail::schema_error(path + ".probs", "length must match digits length");

        bool positive = true;
        double sum = 0.0;
        for (double pr : p.probs) {
            if (!(pr > 0.0)) positive = false;
            sum += pr;
        }
        const double off = std::abs(sum - 1.0);
        if (positive && off > 4.0 * std::numeric_limits<double>::epsilon() && off <= 1e-12) {
            for (double& pr : p.probs) pr /= sum;
            cfg.system.notes.push_back(
                {Severity::info, "pattern '" + p.name + "': probabilities renormalized (input sum " +
                                     detail::fmt17(sum) + ")"});
        }
        cfg.system.patterns.push_back(std::move(p));
    }

    const Json& jf = doc["frequencies"];
    for (const Pattern& p : cfg.system.patterns) {
        if (!jf.contains(p.name))
            detail::schema_error("frequencies", "missing entry for pattern '" + p.name + "'");
        const Json& e = jf[p.name];
        if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() ||
            !e[1].is_number_integer())
            detail::schema_error("frequencies." + p.name, "must be [numerator, denominator]");
        const auto num = e[0].get<long long>();
        const auto den = e[1].get<long long>();
        if (den == 0) detail::schema_error("frequencies." + p.name, "denominator must not be 0");
        cfg.system.frequencies.emplace_back(BigInt(num), BigInt(den));
    }
    for (const auto& [name, _] : jf.items())
        if (cfg.system.index_of(name) < 0)
            detail::schema_error("frequencies", "unknown pattern name '" + name + "'");

    if (doc.contains("sequence")) {
        const Json& js = doc["sequence"];
        if (!js.is_object() || !js.contains("mode") || !js["mode"].is_string())
            detail::schema_error("sequence", "must be an object with a 'mode' string");
        const std::string mode = js["mode"].get<std::string>();
        if (mode == "balanced") {
            cfg.mode = SequenceMode::balanced;
        } else if (mode == "explicit") {
            cfg.mode = SequenceMode::explicit_levels;
            if (!js.contains("levels") || !js["levels"].is_array() || js["levels"].empty())
                detail::schema_error("sequence.levels", "must be a non-empty array of names");
            for (const Json& jl : js["levels"]) {
                if (!jl.is_string())
                    detail::schema_error("sequence.levels", "entries must be pattern names");
                const std::string name = jl.get<std::string>();
                if (cfg.system.index_of(name) < 0)
                    detail::schema_error("sequence.levels", "unknown pattern name '" + name + "'");
                cfg.explicit_levels.push_back(name);
            }
            cfg.system.notes.push_back(
                {Severity::info, "explicit sequence has " +
                                     std::to_string(cfg.explicit_levels.size()) +
                                     " levels; deeper levels cycle through the list"});
        } else {
            detail::schema_error("sequence.mode", "must be 'balanced' or 'explicit'");
        }
    }
    if (doc.contains("orientation")) {
        const Json& jo = doc["orientation"];
        if (!jo.is_string() ||
            (jo.get<std::string>() != "original" && jo.get<std::string>() != "transposed"))
            detail::schema_error("orientation", "must be 'original' or 'transposed'");
        cfg.system.orientation = jo.get<std::string>() == "original" ? Orientation::original
                                                                     : Orientation::transposed;
    }
    return cfg;
}

inline PatternSystem parse_system(const std::string& text) { return parse_config(text).system; }

inline std::string serialize_config(const Config& cfg) {
    Json doc;
    doc["patterns"] = Json::array();
    for (const Pattern& p : cfg.system.patterns) {
        Json jp;
        jp["name"] = p.name;
        jp["n"] = p.n;
        jp["m"] = p.m;
        jp["digits"] = Json::array();
        for (const Digit& d : p.digits) jp["digits"].push_back({d.i, d.j});
        jp["probs"] = p.probs;
        doc["patterns"].push_back(jp);
    }
    doc["frequencies"] = Json::object();
    for (std::size_t g = 0; g < cfg.system.size(); ++g) {
        const BigRat& f = cfg.system.frequencies[g];
        doc["frequencies"][cfg.system.patterns[g].name] = {
            static_cast<long long>(boost::multiprecision::numerator(f)),
            static_cast<long long>(boost::multiprecision::denominator(f))};
    }
    if (cfg.mode == SequenceMode::balanced) {
        doc["sequence"] = {{"mode", "balanced"}};
    } else {
        doc["sequence"] = {{"mode", "explicit"}, {"levels", cfg.explicit_levels}};
    }
    doc["orientation"] =
        cfg.system.orientation == Orientation::original ? "original" : "transposed";
    return doc.dump(2) + "\n";
}

inline PatternSequence make_sequence(const Config& cfg) {
    return realize_sequence(cfg.system, cfg.mode, cfg.explicit_levels);
}

/// Stable 64-bit FNV-1a digest of the input bytes, as a hex string.
inline std::string fnv1a64_hex(const std::string& bytes) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

// ---------------------------------------------------------------------------
// Emitters

/// CSV with a fixed `t,beta,alpha,H` header, 17 significant digits, and a
/// leading comment row recording the orientation used.
inline std::string emit_spectrum_csv(const SpectrumCurve& curve) {
    std::string out = "# orientation: ";
    out += curve.orientation_used == Orientation::original ? "original" : "transposed";
    out += "\nt,beta,alpha,H\n";
    for (const SpectrumSample& s : curve.samples) {
        out += detail::fmt17(s.t);
        out += ',';
        out += detail::fmt17(s.beta_value);
        out += ',';
        out += detail::fmt17(s.alpha_value);
        out += ',';
        out += detail::fmt17(s.H);
        out += '\n';
    }
    return out;
}

/// Minimal static SVG plot of H against alpha.  No timestamps, nothing
/// non-deterministic.
inline std::string emit_spectrum_svg(const SpectrumCurve& curve) {
    const int W = 640, Ht = 480, ml = 60, mr = 20, mt = 20, mb = 45;
    double a_lo = curve.samples.front().alpha_value, a_hi = a_lo;
    double h_lo = curve.samples.front().H, h_hi = h_lo;
    for (const SpectrumSample& s : curve.samples) {
        a_lo = std::min(a_lo, s.alpha_value);
        a_hi = std::max(a_hi, s.alpha_value);
        h_lo = std::min(h_lo, s.H);
        h_hi = std::max(h_hi, s.H);
    }
    if (!(a_hi > a_lo)) a_hi = a_lo + 1;
    if (!(h_hi > h_lo)) h_hi = h_lo + 1;
    auto px = [&](double a) { return ml + (a - a_lo) / (a_hi - a_lo) * (W - ml - mr); };
    auto py = [&](double h) { return Ht - mb - (h - h_lo) / (h_hi - h_lo) * (Ht - mt - mb); };
    auto num = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.6g", v);
        return std::string(buf);
    };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << Ht
        << "\" viewBox=\"0 0 " << W << " " << Ht << "\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
        << "<line x1=\"" << ml << "\" y1=\"" << Ht - mb << "\" x2=\"" << W - mr << "\" y2=\""
        << Ht - mb << "\" stroke=\"black\"/>\n"
        << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\"" << Ht - mb
        << "\" stroke=\"black\"/>\n";
    svg << "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.5\" points=\"";
    for (const SpectrumSample& s : curve.samples)
        svg << num(px(s.alpha_value)) << "," << num(py(s.H)) << " ";
    svg << "\"/>\n";
    svg << "<text x=\"" << (ml + W - mr) / 2 << "\" y=\"" << Ht - 10
        << "\" font-size=\"14\" text-anchor=\"middle\">alpha</text>\n"
        << "<text x=\"15\" y=\"" << (mt + Ht - mb) / 2
        << "\" font-size=\"14\" text-anchor=\"middle\" transform=\"rotate(-90 15 "
        << (mt + Ht - mb) / 2 << ")\">H(alpha)</text>\n"
        << "<text x=\"" << ml << "\" y=\"" << Ht - mb + 16 << "\" font-size=\"11\">" << num(a_lo)
        << "</text>\n"
        << "<text x=\"" << W - mr << "\" y=\"" << Ht - mb + 16
        << "\" font-size=\"11\" text-anchor=\"end\">" << num(a_hi) << "</text>\n"
        << "<text x=\"" << ml - 6 << "\" y=\"" << py(h_hi) + 4
        << "\" font-size=\"11\" text-anchor=\"end\">" << num(h_hi) << "</text>\n"
        << "<text x=\"" << ml - 6 << "\" y=\"" << py(h_lo) + 4
        << "\" font-size=\"11\" text-anchor=\"end\">" << num(h_lo) << "</text>\n"
        << "</svg>\n";
    return svg.str();
}

struct Raster {
    std::size_t width = 0;
    std::size_t height = 0;
    std::vector<std::uint8_t> pixels;  // row-major, row 0 at the top

    std::uint8_t& at(std::size_t x, std::size_t y) { return pixels[y * width + x]; }
};

inline std::string emit_p5(const Raster& r) {
    std::string out = "P5\n" + std::to_string(r.width) + " " + std::to_string(r.height) + "\n255\n";
    out.append(reinterpret_cast<const char*>(r.pixels.data()), r.pixels.size());
    return out;
}

enum class RenderMode { set, measure, tilted };

constexpr std::uint64_t kDefaultPixelCap = 1ULL << 24;

/// Rasterizes the level-k approximate squares on the exact N_l x M_k grid.
/// Set mode marks occupied cells; measure modes map log-measure linearly to
/// gray (largest measure darkest).
inline Raster render_squares(const PatternSequence& seq, std::size_t k, RenderMode mode,
                             double tilt_t = 0.0, std::uint64_t pixel_cap = kDefaultPixelCap,
                             std::uint64_t enum_cap = kDefaultEnumCap) {
    const CumulativeScales sc = scales(seq, k);
    const std::size_t l = l_of_k(sc, k);
    const BigInt pixels = sc.n_products[l - 1] * sc.m_products[k - 1];
    if (pixels > pixel_cap)
        throw SizeError("raster of " + pixels.str() + " pixels exceeds cap " +
                        std::to_string(pixel_cap));

    Raster r;
    r.width = static_cast<std::size_t>(sc.n_products[l - 1]);
    r.height = static_cast<std::size_t>(sc.m_products[k - 1]);
    r.pixels.assign(r.width * r.height, 255);

    // Exact cell index of an address: x = sum i_h * (N_l / N_h).
    std::vector<std::uint64_t> xf(l), yf(k);
    for (std::size_t h = 0; h < l; ++h)
        xf[h] = static_cast<std::uint64_t>(sc.n_products[l - 1] / sc.n_products[h]);
    for (std::size_t h = 0; h < k; ++h)
        yf[h] = static_cast<std::uint64_t>(sc.m_products[k - 1] / sc.m_products[h]);

    std::vector<std::pair<std::uint64_t, double>> cells;  // (pixel index, log measure)
    const bool tilted = mode == RenderMode::tilted;
    TiltParams tp;
    if (tilted) tp = tilt(seq.system(), tilt_t);
    enumerate_squares(
        seq, sc, k,
        [&](const ApproxSquareAddress& a) {
            std::uint64_t x = 0, y = 0;
            for (std::size_t h = 0; h < l; ++h) x += static_cast<std::uint64_t>(a.i_part[h]) * xf[h];
            for (std::size_t h = 0; h < k; ++h) y += static_cast<std::uint64_t>(a.j_part[h]) * yf[h];
            const std::uint64_t pix = (r.height - 1 - y) * r.width + x;
            if (mode == RenderMode::set)
                r.pixels[pix] = 0;
            else
                cells.emplace_back(pix, tilted ? mu_t_square(seq, sc, a, tp)
                                               : mu_square(seq, sc, a));
        },
        enum_cap);

    if (mode != RenderMode::set) {
        double lo = 0.0, hi = 0.0;
        for (std::size_t c = 0; c < cells.size(); ++c) {
            if (c == 0)
                lo = hi = cells[c].second;
            else {
                lo = std::min(lo, cells[c].second);
                hi = std::max(hi, cells[c].second);
            }
        }
        for (const auto& [pix, lm] : cells) {
            const double g = hi > lo ? (hi - lm) / (hi - lo) * 255.0 : 0.0;
            r.pixels[pix] = static_cast<std::uint8_t>(g + 0.5);
        }
    }
    return r;
}

/// One diagram per pattern: the n x m digit layout, occupied cells black.
inline Raster render_pattern_diagram(const Pattern& p, std::size_t cell_px = 32) {
    Raster r;
    r.width = static_cast<std::size_t>(p.n) * cell_px;
    r.height = static_cast<std::size_t>(p.m) * cell_px;
    r.pixels.assign(r.width * r.height, 255);
    for (const Digit& d : p.digits) {
        const std::size_t x0 = static_cast<std::size_t>(d.i) * cell_px;
        const std::size_t y0 = (static_cast<std::size_t>(p.m) - 1 - d.j) * cell_px;
        for (std::size_t y = y0; y < y0 + cell_px; ++y)
            for (std::size_t x = x0; x < x0 + cell_px; ++x) r.pixels[y * r.width + x] = 0;
    }
    return r;
}

// ---------------------------------------------------------------------------
// Structured report

inline Json validation_to_json(const ValidationReport& rep) {
    Json j;
    j["ok"] = rep.ok;
    j["messages"] = Json::array();
    for (const Message& msg : rep.messages) {
        const char* sev = msg.severity == Severity::error ? "error"
                          : msg.severity == Severity::warning ? "warning"
                                                              : "info";
        j["messages"].push_back({{"severity", sev}, {"text", msg.text}});
    }
    if (std::isfinite(rep.zeta_value)) j["zeta"] = rep.zeta_value;
    j["n_plus"] = rep.n_plus_value;
    j["row_occupancy"] = rep.row_occupancy;
    j["col_occupancy"] = rep.col_occupancy;
    return j;
}

inline Json conditions_to_json(const ConditionReport& rep) {
    auto check = [](const ConditionCheck& c) {
        return Json{{"holds", c.holds}, {"details", c.details}};
    };
    Json j;
    j["rsc"] = check(rep.rsc);
    j["tbsc"] = check(rep.tbsc);
    j["csc"] = check(rep.csc);
    j["lrsc"] = check(rep.lrsc);
    j["cor2"] = check(rep.cor2);
    j["zeta"] = rep.zeta_value;
    j["licensed"] = to_string(rep.licensed);
    j["notes"] = rep.notes;
    return j;
}

inline Json mcstats_to_json(const McStats& s) {
    return Json{{"t", s.t},
                {"depth", s.k},
                {"samples", s.n_samples},
                {"seed", s.seed},
                {"mean", s.mean},
                {"stddev", s.stddev},
                {"target_alpha", s.target_alpha},
                {"relative_deviation", s.relative_deviation}};
}

struct ReportOptions {
    std::size_t spectrum_steps = 33;
    std::size_t partition_depth = 4;
    std::vector<double> moment_ts = {-2.0, -1.0, 0.5, 2.0};
    std::size_t mc_depth = 200;
    std::size_t mc_samples = 2000;
    std::uint64_t mc_seed = 1;
    std::uint64_t enum_cap = kDefaultEnumCap;
    bool include_timing = false;  // off by default: the report must be byte-stable
    double timing_seconds = 0.0;
};

/// The full structured run report.  Every numeric field is finite and the
/// document is a pure function of (input bytes, options).
inline Json build_report(const std::string& config_bytes, const ReportOptions& opt = {}) {
    const Config cfg = parse_config(config_bytes);
    const ValidationReport val = validate_system(cfg.system);
    const ConditionReport cond = condition_report(cfg.system);

    Json rep;
    rep["version"] = kVersion;
    rep["input_digest"] = "fnv1a64:" + fnv1a64_hex(config_bytes);
    rep["validation"] = validation_to_json(val);
    rep["conditions"] = conditions_to_json(cond);
    if (!val.ok) return rep;

    const double z = zeta(cfg.system);
    rep["zeta"] = z;
    const bool transposed = z > 1.0;
    rep["orientation_used"] = transposed ? "transposed" : "original";
    Config work = cfg;
    if (transposed) work.system = transpose(cfg.system);
    const PatternSequence seq = make_sequence(work);

    const AlphaRange range = alpha_range(work.system);
    rep["alpha_range"] = {{"min", range.alpha_min},
                          {"max", range.alpha_max},
                          {"degenerate", range.degenerate()}};

    if (range.degenerate()) {
        rep["spectrum"] = {{"degenerate", true},
                           {"alpha", range.alpha_min},
                           {"note", "H is the single exponent alpha_min = alpha_max"}};
    } else {
        GridSpec grid;
        grid.alpha_steps = opt.spectrum_steps;
        const SpectrumCurve curve = spectrum_curve(work.system, grid);
        Json samples = Json::array();
        for (const SpectrumSample& s : curve.samples)
            samples.push_back(
                {{"t", s.t}, {"beta", s.beta_value}, {"alpha", s.alpha_value}, {"H", s.H}});
        rep["spectrum"] = {{"degenerate", false}, {"samples", samples}};
    }
    if (cond.licensed == Licensed::none)
        rep["warnings"] = {"spectrum formula unproven for this system"};

    const PartitionResiduals part = partition_check(seq, opt.partition_depth, {-2.0, 0.0, 0.5, 1.0, 2.0},
                                                    opt.enum_cap);
    Json tilted = Json::array();
    for (const auto& [t, r] : part.tilted) tilted.push_back({{"t", t}, {"residual", r}});
    rep["checks"]["partition"] = {{"depth", part.k},
                                  {"base_residual", part.base_residual},
                                  {"tilted", tilted},
                                  {"tilted_max_residual", part.tilted_max_residual}};
    Json moments = Json::array();
    for (double t : opt.moment_ts) {
        const MomentCrosscheck mc = moment_crosscheck(seq, opt.partition_depth, t, opt.enum_cap);
        moments.push_back({{"t", mc.t},
                           {"enumerated", mc.enumerated},
                           {"product_form", mc.product_form},
                           {"relative_gap", mc.relative_gap}});
    }
    rep["checks"]["moments"] = moments;
    rep["checks"]["mc_local_dimension"] =
        mcstats_to_json(mc_local_dimension(seq, 1.0, opt.mc_depth, opt.mc_samples, opt.mc_seed));
    if (opt.include_timing) rep["timing_seconds"] = opt.timing_seconds;
    return rep;
}

}  // namespace moranfrac

#endif
