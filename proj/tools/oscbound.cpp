#include "oscbound/concentration.hpp"
#include "oscbound/cz.hpp"
#include "oscbound/error.hpp"
#include "oscbound/grid_io.hpp"
#include "oscbound/harness.hpp"
#include "oscbound/oscillation.hpp"
#include "oscbound/rearrangement.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace oscbound;

namespace {

constexpr int kPass = 0;
constexpr int kViolation = 1;
constexpr int kUsage = 2;

void write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + path);
    out << text;
}

void write_json(const std::string& path, const nlohmann::json& j) { write_text(path, j.dump(2) + "\n"); }

// "64" or "64x32x16"; a single value repeats over all axes.
std::vector<std::size_t> parse_extents(const std::string& text, std::size_t dim) {
    std::vector<std::size_t> out;
    std::stringstream in(text);
    std::string part;
    while (std::getline(in, part, 'x')) {
        if (part.empty()) throw Error(ErrorCode::InvalidArgument, "bad grid '" + text + "'");
        out.push_back(std::stoul(part));
    }
    if (out.size() == 1) out.assign(dim, out[0]);
    if (out.size() != dim) throw Error(ErrorCode::DimensionMismatch, "grid '" + text + "' does not have " + std::to_string(dim) + " axes");
    return out;
}

struct VerifyArgs {
    SuiteConfig cfg;
    std::string grid;
    std::string weights;
    std::string out;
    std::string csv;
    std::string plot;
};

int run_verify(VerifyArgs& a) {
    if (!a.grid.empty()) a.cfg.extents = parse_extents(a.grid, a.cfg.dim);
    if (!a.weights.empty()) {
        std::stringstream in(a.weights);
        std::string part;
        std::size_t i = 0;
        while (std::getline(in, part, ',')) {
            if (i >= kCorpusFamilies) throw Error(ErrorCode::InvalidArgument, "too many corpus weights");
            a.cfg.weights[i++] = std::stod(part);
        }
        if (i != kCorpusFamilies) throw Error(ErrorCode::InvalidArgument, "expected six corpus weights");
    }
    if (a.cfg.reproducer_dir.empty()) {
        a.cfg.reproducer_dir = a.out.empty() ? fs::path("reproducers") : fs::path(a.out).parent_path() / "reproducers";
    }
    const auto report = run_suite(a.cfg);
    write_json(a.out, report.to_json());
    if (!a.csv.empty()) write_text(a.csv, report.to_csv());
    if (!a.plot.empty()) write_text(a.plot, plot_data({report}));
    std::cerr << report.suite << " n=" << a.cfg.dim << " max_ratio=" << report.max_ratio
              << " constant=" << report.constant << " verdict=" << (report.pass ? "pass" : "fail") << '\n';
    return report.pass ? kPass : kViolation;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Mean oscillation, rearrangement and Calderon-Zygmund tools"};
    app.require_subcommand(1);

    VerifyArgs va;
    auto* verify = app.add_subcommand("verify", "Run an inequality suite");
    verify->add_option("--suite", va.cfg.suite, "Suite id")->required();
    verify->add_option("--dim", va.cfg.dim, "Dimension")->check(CLI::Range(1, 8));
    verify->add_option("--grid", va.grid, "Extents, e.g. 64 or 64x64");
    verify->add_option("--trials", va.cfg.trials);
    verify->add_option("--seed", va.cfg.seed);
    verify->add_flag("--refine,!--no-refine", va.cfg.refine, "Refine the majorant (default on)");
    verify->add_option("--slack", va.cfg.slack, "Relative slack");
    verify->add_option("--threads", va.cfg.threads);
    verify->add_option("--supersample", va.cfg.supersample);
    verify->add_option("--samples", va.cfg.samples, "Points per containment witness");
    verify->add_option("--density", va.cfg.density, "Block density for dyadic unions");
    verify->add_option("--weights", va.weights, "Six corpus family weights, comma separated");
    verify->add_option("--repro-dir", va.cfg.reproducer_dir);
    verify->add_option("--out", va.out, "Report JSON (stdout when omitted)");
    verify->add_option("--csv", va.csv);
    verify->add_option("--plot-data", va.plot);

    std::string osc_input, osc_basis = "cubes", osc_out;
    ScanOptions osc_opt;
    auto* osc = app.add_subcommand("oscillation", "Seminorm of a grid over a basis");
    osc->add_option("--input", osc_input)->required();
    osc->add_option("--basis", osc_basis)->check(CLI::IsMember({"cubes", "rectangles", "falsecubes"}));
    osc->add_flag("--refine", osc_opt.refine);
    osc->add_flag("--per-scale", osc_opt.per_scale);
    osc->add_option("--threads", osc_opt.threads);
    osc->add_option("--out", osc_out);

    std::string czd_input, czd_method = "bisection", czd_out;
    std::optional<double> czd_t, czd_level;
    auto* czd = app.add_subcommand("czd", "Calderon-Zygmund decomposition");
    czd->add_option("--input", czd_input)->required();
    auto* t_opt = czd->add_option("--t", czd_t, "Measure threshold");
    auto* level_opt = czd->add_option("--level", czd_level, "Level gamma");
    t_opt->excludes(level_opt);
    czd->add_option("--method", czd_method)->check(CLI::IsMember({"dyadic", "bisection", "risingsun"}));
    czd->add_option("--out", czd_out);

    std::string re_input, re_csv, re_json;
    bool re_distribution = false;
    auto* re = app.add_subcommand("rearrange", "Decreasing rearrangement of a grid");
    re->add_option("--input", re_input)->required();
    re->add_option("--csv", re_csv, "CSV output")->required();
    re->add_option("--json", re_json, "JSON output")->required();
    re->add_flag("--distribution", re_distribution, "Write the distribution function instead");

    std::string conc_random, conc_input, conc_out;
    std::size_t conc_trials = 1;
    std::uint64_t conc_seed = 1;
    double conc_p = 0.5;
    auto* conc = app.add_subcommand("concentration", "Exact bounded-difference check");
    conc->add_option("--random", conc_random, "m=<bits> for random instances");
    conc->add_option("--input", conc_input, "Instance JSON");
    conc->add_option("--trials", conc_trials);
    conc->add_option("--seed", conc_seed);
    conc->add_option("--p", conc_p)->check(CLI::Range(0.0, 1.0));
    conc->add_option("--out", conc_out);

    std::size_t const_dim = 0;
    std::string const_out;
    auto* cons = app.add_subcommand("constants", "Constants table");
    cons->add_option("--dim", const_dim, "Single dimension (1 to 8 when omitted)");
    cons->add_option("--out", const_out);

    std::string corp_family, corp_grid = "64", corp_dir = ".";
    std::size_t corp_dim = 2, corp_count = 1;
    std::uint64_t corp_seed = 1;
    std::optional<double> corp_density;
    auto* corp = app.add_subcommand("corpus", "Write corpus grids");
    corp->add_option("--family", corp_family, "Family; mixed by weight when omitted");
    corp->add_option("--dim", corp_dim)->check(CLI::Range(1, 8));
    corp->add_option("--grid", corp_grid);
    corp->add_option("--count", corp_count);
    corp->add_option("--seed", corp_seed);
    corp->add_option("--density", corp_density);
    corp->add_option("--out-dir", corp_dir);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }

    try {
        if (verify->parsed()) return run_verify(va);

        if (osc->parsed()) {
            const auto f = load_grid(osc_input);
            BasisDescriptor b;
            b.family = basis_family_from_string(osc_basis);
            const auto r = bmo_seminorm(f, b, osc_opt);
            auto j = r.to_json();
            j["basis"] = osc_basis;
            j["input"] = osc_input;
            write_json(osc_out, j);
            return kPass;
        }

        if (czd->parsed()) {
            const auto g = load_grid(czd_input);
            if (!czd_t && !czd_level) throw Error(ErrorCode::InvalidArgument, "one of --t and --level is required");
            CZDecomposition d;
            if (czd_method == "dyadic") {
                d = czd_t ? dyadic_cz_from_t(g, *czd_t) : dyadic_cz(g, *czd_level);
            } else if (czd_method == "bisection") {
                d = czd_t ? bisection_cz(g, *czd_t) : bisection_cz_level(g, *czd_level);
            } else {
                d = rising_sun_1d(g, czd_t ? level_from_t(g, *czd_t) : *czd_level);
            }
            const auto v = validate_cz(g, d);
            auto j = d.to_json(g);
            j["validation"] = v.to_json();
            write_json(czd_out, j);
            return v.ok ? kPass : kViolation;
        }

        if (re->parsed()) {
            const auto f = load_grid(re_input);
            const auto s = re_distribution ? distribution(f) : decreasing_rearrangement(f);
            write_text(re_csv, s.to_csv());
            write_json(re_json, s.to_json());
            return kPass;
        }

        if (conc->parsed()) {
            nlohmann::json out = nlohmann::json::array();
            bool ok = true;
            auto check = [&](const ConcentrationInstance& inst) {
                const auto c = check_concentration(inst);
                ok = ok && c.lhs <= c.rhs + 1e-12;
                out.push_back({{"m", inst.m}, {"p", inst.p}, {"mean", c.mean}, {"lhs", c.lhs}, {"rhs", c.rhs},
                               {"a", bounded_differences(inst)}});
            };
            if (!conc_input.empty()) {
                std::ifstream in(conc_input);
                if (!in) throw Error(ErrorCode::Io, "cannot read " + conc_input);
                check(ConcentrationInstance::from_json(nlohmann::json::parse(in)));
            } else {
                if (conc_random.empty()) throw Error(ErrorCode::InvalidArgument, "--random or --input is required");
                const auto eq = conc_random.find('=');
                const std::size_t m = std::stoul(eq == std::string::npos ? conc_random : conc_random.substr(eq + 1));
                if (m > kMaxConcentrationBits) throw Error(ErrorCode::OutOfRange, "m must be at most 20");
                std::mt19937_64 rng(conc_seed);
                std::normal_distribution<double> gauss;
                for (std::size_t t = 0; t < conc_trials; ++t) {
                    std::vector<double> table(std::size_t{1} << m);
                    for (auto& x : table) x = gauss(rng);
                    check(ConcentrationInstance(m, std::move(table), conc_p));
                }
            }
            write_json(conc_out, {{"instances", out}, {"verdict", ok ? "pass" : "fail"}});
            return ok ? kPass : kViolation;
        }

        if (cons->parsed()) {
            nlohmann::json rows = nlohmann::json::array();
            for (std::size_t n = const_dim ? const_dim : 1; n <= (const_dim ? const_dim : 8); ++n) {
                rows.push_back(constants(n).to_json());
            }
            write_json(const_out, rows);
            return kPass;
        }

        if (corp->parsed()) {
            CorpusOptions opt;
            opt.extents = parse_extents(corp_grid, corp_dim);
            opt.density = corp_density;
            fs::create_directories(corp_dir);
            for (std::size_t i = 0; i < corp_count; ++i) {
                const auto f = corp_family.empty()
                                   ? corpus_member(opt, corp_seed, i)
                                   : generate_function(corpus_family_from_string(corp_family), opt,
                                                       splitmix64(corp_seed + i));
                const auto path = fs::path(corp_dir) / ("f" + std::to_string(i) + ".oscg");
                save_grid(f, path);
                std::cout << path.string() << '\n';
            }
            return kPass;
        }
    } catch (const Error& e) {
        std::cerr << "error [" << to_string(e.code()) << "]: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    }
    return kUsage;
}
