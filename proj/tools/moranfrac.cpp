// moranfrac: spectra, separation conditions, and empirical checks for
// self-affine Moran carpet measures with pattern frequencies.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "moranfrac/moranfrac.hpp"

namespace {

using namespace moranfrac;

constexpr int kExitOk = 0;
constexpr int kExitDomain = 1;
constexpr int kExitUsage = 2;

struct Cli {
    std::string config_path;
    std::string out_path = "-";
    std::string format = "csv";
    std::string mode = "set";
    std::optional<double> t_min, t_max;
    double t = 1.0;
    std::size_t alpha_steps = 101;
    std::size_t depth = 4;
    std::size_t samples = 10000;
    std::uint64_t seed = 1;
    std::string samples_out;
    std::uint64_t enum_cap = kDefaultEnumCap;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError(ConfigError::Kind::parse, "cannot read file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_output(const std::string& path, const std::string& bytes) {
    if (path == "-") {
        std::cout << bytes;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError(ConfigError::Kind::parse, "cannot write file '" + path + "'");
    out << bytes;
}

std::string severity_tag(Severity s) {
    switch (s) {
        case Severity::error: return "error";
        case Severity::warning: return "warning";
        default: return "info";
    }
}

void print_validation(std::ostream& os, const ValidationReport& rep) {
    os << "validation: " << (rep.ok ? "ok" : "FAILED") << "\n";
    for (const Message& m : rep.messages)
        os << "  [" << severity_tag(m.severity) << "] " << m.text << "\n";
    if (std::isfinite(rep.zeta_value)) os << "zeta: " << rep.zeta_value << "\n";
    os << "N+: " << rep.n_plus_value << "\n";
    for (const auto& [name, rows] : rep.row_occupancy) {
        os << "pattern " << name << ": rows";
        for (const auto& [j, r] : rows) os << " " << j << ":" << r;
        os << " cols";
        for (const auto& [i, r] : rep.col_occupancy.at(name)) os << " " << i << ":" << r;
        os << "\n";
    }
}

void print_conditions(std::ostream& os, const ConditionReport& rep) {
    auto line = [&](const char* name, const ConditionCheck& c) {
        os << name << ": " << (c.holds ? "true" : "false");
        if (!c.details.empty()) os << "  (" << c.details << ")";
        os << "\n";
    };
    line("RSC", rep.rsc);
    line("TBSC", rep.tbsc);
    line("CSC", rep.csc);
    line("LRSC", rep.lrsc);
    line("cor2", rep.cor2);
    os << "licensed: " << to_string(rep.licensed) << "\n";
    for (const std::string& n : rep.notes) os << "note: " << n << "\n";
}

int cmd_validate(const Cli& cli) {
    const Config cfg = parse_config(read_file(cli.config_path));
    const ValidationReport rep = validate_system(cfg.system);
    print_validation(std::cout, rep);
    if (rep.ok) print_conditions(std::cout, condition_report(cfg.system));
    return rep.ok ? kExitOk : kExitDomain;
}

/// Parses, validates (throws DomainError on invalid), and orients.
struct LoadedSystem {
    Config cfg;                 // as parsed
    Config work;                // zeta-normalized orientation
    bool transposed = false;
    PatternSequence seq;        // over the oriented system
};

LoadedSystem load_for_computation(const Cli& cli) {
    LoadedSystem ls;
    ls.cfg = parse_config(read_file(cli.config_path));
    const ValidationReport rep = validate_system(ls.cfg.system);
    if (!rep.ok) {
        std::ostringstream os;
        print_validation(os, rep);
        throw DomainError("invalid configuration:\n" + os.str());
    }
    ls.work = ls.cfg;
    if (zeta(ls.cfg.system) > 1.0) {
        ls.work.system = transpose(ls.cfg.system);
        ls.transposed = true;
    }
    ls.seq = make_sequence(ls.work);
    return ls;
}

int cmd_spectrum(const Cli& cli) {
    const LoadedSystem ls = load_for_computation(cli);
    GridSpec grid;
    grid.alpha_steps = cli.alpha_steps;
    grid.t_min = cli.t_min;
    grid.t_max = cli.t_max;
    const SpectrumCurve curve = spectrum_curve(ls.cfg.system, grid);
    if (cli.format == "svg")
        write_output(cli.out_path, emit_spectrum_svg(curve));
    else
        write_output(cli.out_path, emit_spectrum_csv(curve));
    return kExitOk;
}

int cmd_sample(const Cli& cli) {
    if (cli.samples == 0)
        throw CLI::ValidationError("--samples", "must be >= 1");
    const LoadedSystem ls = load_for_computation(cli);
    const McStats stats = mc_local_dimension(ls.seq, cli.t, cli.depth, cli.samples, cli.seed);
    Json rec = mcstats_to_json(stats);
    rec["version"] = kVersion;
    rec["orientation_used"] = ls.transposed ? "transposed" : "original";
    write_output(cli.out_path, rec.dump(2) + "\n");
    if (!cli.samples_out.empty()) {
        std::string csv = "index,ratio\n";
        for (std::size_t s = 0; s < stats.ratios.size(); ++s) {
            char buf[64];
            std::snprintf(buf, sizeof buf, "%zu,%.17g\n", s, stats.ratios[s]);
            csv += buf;
        }
        write_output(cli.samples_out, csv);
    }
    return kExitOk;
}

int cmd_enumerate(const Cli& cli, bool with_tilt) {
    const LoadedSystem ls = load_for_computation(cli);
    const CumulativeScales sc = scales(ls.seq, cli.depth);
    std::optional<TiltParams> tp;
    if (with_tilt) tp = tilt(ls.work.system, cli.t);

    std::string csv = with_tilt ? "k,l,i,j,log_mu,log_mu_t\n" : "k,l,i,j,log_mu\n";
    auto join = [](const std::vector<int>& xs) {
        std::string s;
        for (std::size_t idx = 0; idx < xs.size(); ++idx) {
            if (idx) s += '-';
            s += std::to_string(xs[idx]);
        }
        return s;
    };
    enumerate_squares(
        ls.seq, sc, cli.depth,
        [&](const ApproxSquareAddress& a) {
            char buf[64];
            csv += std::to_string(a.k) + "," + std::to_string(a.l) + "," + join(a.i_part) + "," +
                   join(a.j_part);
            std::snprintf(buf, sizeof buf, ",%.17g", mu_square(ls.seq, sc, a));
            csv += buf;
            if (with_tilt) {
                std::snprintf(buf, sizeof buf, ",%.17g", mu_t_square(ls.seq, sc, a, *tp));
                csv += buf;
            }
            csv += '\n';
        },
        cli.enum_cap);
    write_output(cli.out_path, csv);
    return kExitOk;
}

int cmd_render(const Cli& cli) {
    const LoadedSystem ls = load_for_computation(cli);
    RenderMode mode = RenderMode::set;
    double tilt_t = 0.0;
    if (cli.mode == "set") {
        mode = RenderMode::set;
    } else if (cli.mode == "measure") {
        mode = RenderMode::measure;
    } else if (cli.mode.rfind("tilted:", 0) == 0) {
        mode = RenderMode::tilted;
        tilt_t = std::stod(cli.mode.substr(7));
    } else {
        throw CLI::ValidationError("--mode", "must be set, measure, or tilted:<t>");
    }
    const Raster r = render_squares(ls.seq, cli.depth, mode, tilt_t, kDefaultPixelCap, cli.enum_cap);
    write_output(cli.out_path, emit_p5(r));
    if (cli.out_path != "-") {
        for (const Pattern& p : ls.cfg.system.patterns) {
            const Raster d = render_pattern_diagram(p);
            write_output(cli.out_path + "." + p.name + ".pgm", emit_p5(d));
        }
    }
    return kExitOk;
}

int cmd_report(const Cli& cli) {
    const std::string bytes = read_file(cli.config_path);
    {   // reject invalid configs with exit 1, mirroring the other commands
        const Config cfg = parse_config(bytes);
        const ValidationReport rep = validate_system(cfg.system);
        if (!rep.ok) {
            std::ostringstream os;
            print_validation(os, rep);
            throw DomainError("invalid configuration:\n" + os.str());
        }
    }
    ReportOptions opt;
    opt.enum_cap = cli.enum_cap;
    write_output(cli.out_path, build_report(bytes, opt).dump(2) + "\n");
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"self-affine Moran measure spectra and diagnostics"};
    app.require_subcommand(1);

    Cli cli;
    if (const char* cap = std::getenv("MORANFRAC_ENUM_CAP")) cli.enum_cap = std::strtoull(cap, nullptr, 10);

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", cli.config_path, "configuration document")->required();
        sub->add_option("--out", cli.out_path, "output path ('-' for stdout)");
        return sub;
    };
    auto* validate = app.add_subcommand("validate", "check a configuration");
    validate->add_option("--config", cli.config_path, "configuration document")->required();

    auto* spectrum = add_common(app.add_subcommand("spectrum", "write the H(alpha) curve"));
    spectrum->add_option("--t-min", cli.t_min, "restrict the curve to t >= this");
    spectrum->add_option("--t-max", cli.t_max, "restrict the curve to t <= this");
    spectrum->add_option("--alpha-steps", cli.alpha_steps, "number of alpha grid points");
    spectrum->add_option("--format", cli.format, "csv or svg")
        ->check(CLI::IsMember({"csv", "svg"}));

    auto* sample = add_common(app.add_subcommand("sample", "Monte Carlo local-dimension ratio"));
    sample->add_option("--t", cli.t, "tilt parameter");
    sample->add_option("--depth", cli.depth, "approximate-square depth k");
    sample->add_option("--samples", cli.samples, "number of sampled words");
    sample->add_option("--seed", cli.seed, "PRNG seed");
    sample->add_option("--samples-out", cli.samples_out, "optional per-sample CSV path");

    auto* enumerate = add_common(app.add_subcommand("enumerate", "list depth-k approximate squares"));
    enumerate->add_option("--depth", cli.depth, "approximate-square depth k");
    bool with_tilt = false;
    enumerate->add_flag("--with-tilt", with_tilt, "also emit log mu_t");
    enumerate->add_option("--t", cli.t, "tilt parameter for --with-tilt");

    auto* render = add_common(app.add_subcommand("render", "rasterize level-k squares (P5)"));
    render->add_option("--depth", cli.depth, "approximate-square depth k");
    render->add_option("--mode", cli.mode, "set | measure | tilted:<t>");

    auto* report = add_common(app.add_subcommand("report", "full structured report (JSON)"));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (validate->parsed()) return cmd_validate(cli);
        if (spectrum->parsed()) return cmd_spectrum(cli);
        if (sample->parsed()) return cmd_sample(cli);
        if (enumerate->parsed()) return cmd_enumerate(cli, with_tilt);
        if (render->parsed()) return cmd_render(cli);
        if (report->parsed()) return cmd_report(cli);
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitDomain;
    } catch (const SizeError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitDomain;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitDomain;
    }
    return kExitUsage;
}
