// Command-line front end: reproducible experiments over the purity-propagator
// laboratory, emitting machine-readable CSV plus a manifest per run.

#include <CLI11.hpp>
#include <json.hpp>
#include <omp.h>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "phantom/csvio.hpp"
#include "phantom/cyclotomic.hpp"
#include "phantom/haar.hpp"
#include "phantom/kernel.hpp"
#include "phantom/propagator.hpp"
#include "phantom/pseudospectrum.hpp"
#include "phantom/spectral.hpp"
#include "phantom/theta.hpp"

using namespace phantom;
using nlohmann::json;

namespace {

namespace fs = std::filesystem;

struct Common {
    std::string out_dir = "out";
    std::string format = "csv";
};

void add_common(CLI::App* cmd, Common& c) {
    cmd->add_option("--out", c.out_dir, "output directory")->capture_default_str();
    cmd->add_option("--format", c.format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
}

std::string out_path(const Common& c, const std::string& name) {
    fs::create_directories(c.out_dir);
    return (fs::path(c.out_dir) / name).string();
}

json base_manifest(const std::string& sub, const json& cfg) {
    json m;
    m["tool"] = "phantomlab";
    m["version"] = kVersion;
    m["subcommand"] = sub;
    m["config"] = cfg;
    m["threads"] = omp_get_max_threads();
    return m;
}

void finish_manifest(const Common& c, json m, std::vector<std::string> files) {
    m["outputs"] = files;
    write_manifest(out_path(c, "manifest.json"), m);
}

// json rows mirror the csv schema when --format json is chosen
class RowSink {
  public:
    RowSink(const Common& c, const std::string& stem,
            const std::vector<std::string>& header)
        : header_(header), is_json_(c.format == "json") {
        if (is_json_) {
            path_ = out_path(c, stem + ".json");
        } else {
            path_ = out_path(c, stem + ".csv");
            csv_.emplace(path_, header);
        }
    }

    void row(const std::vector<json>& fields) {
        if (is_json_) {
            json r;
            for (std::size_t i = 0; i < fields.size(); ++i) r[header_[i]] = fields[i];
            rows_.push_back(std::move(r));
        } else {
            for (const auto& f : fields) {
                if (f.is_number_float())
                    csv_->field(f.get<double>());
                else if (f.is_number_integer() || f.is_number_unsigned())
                    csv_->field(f.get<long>());
                else
                    csv_->field(f.get<std::string>());
            }
            csv_->end_row();
        }
    }

    std::string finish() {
        if (is_json_) {
            std::ofstream o(path_);
            o << json(rows_).dump(2) << '\n';
        }
        return path_;
    }

  private:
    std::vector<std::string> header_;
    bool is_json_;
    std::string path_;
    std::optional<CsvWriter> csv_;
    std::vector<json> rows_;
};

std::vector<int> parse_k_list(const std::string& s, int n) {
    std::vector<int> out;
    std::size_t pos = 0;
    while (pos < s.size()) {
        const std::size_t comma = s.find(',', pos);
        const std::string tok =
            s.substr(pos, comma == std::string::npos ? comma : comma - pos);
        out.push_back(std::stoi(tok));
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    for (int k : out)
        if (k < 2 || k > n - 1)
            throw std::invalid_argument("k must lie in [2, n-1], got " +
                                        std::to_string(k));
    return out;
}

std::vector<double> parse_eps_grid(const std::string& s) {
    // start:step:stop decimal exponents, eps = 10^{-x}
    const auto c1 = s.find(':');
    const auto c2 = s.find(':', c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos)
        throw std::invalid_argument("--eps-exp expects start:step:stop");
    const double start = std::stod(s.substr(0, c1));
    const double step = std::stod(s.substr(c1 + 1, c2 - c1 - 1));
    const double stop = std::stod(s.substr(c2 + 1));
    if (step <= 0 || start <= 0 || stop < start)
        throw std::invalid_argument("--eps-exp needs 0 < start <= stop, step > 0");
    std::vector<double> out;
    for (double x = start; x <= stop + 1e-12; x += step) out.push_back(x);
    return out;
}

json timescale_json(const ModelParams& p) {
    const auto ts = timescales(p);
    const auto cr = characteristic_rates(p);
    return json{{"t_kernel", ts.t_kernel},
                {"t_transition", ts.t_transition},
                {"t_saturation", ts.t_saturation},
                {"lambda_ph", cr.lambda_ph},
                {"lambda_1", cr.lambda_1}};
}

int run_trajectory(const Common& c, int n, int k, int d, int t_max,
                   const std::string& mode) {
    auto p = make_params(n, k, d);
    RowSink sink(c, "trajectory", {"t", "purity", "delta_purity", "purity_exact"});
    if (mode == "rational") {
        auto traj = iterate_trajectory<Rat>(p, t_max);
        auto inf = steady_state<Rat>(p);
        for (int t = 0; t <= t_max; ++t) {
            const Rat v = traj.steps[t][k - 1];
            sink.row({t, static_cast<double>(v), static_cast<double>(v - inf[k - 1]),
                      v.str()});
        }
    } else {
        auto traj = iterate_trajectory<double>(p, t_max);
        auto inf = steady_state<double>(p);
        for (int t = 0; t <= t_max; ++t) {
            const double v = traj.steps[t][k - 1];
            sink.row({t, v, v - inf[k - 1], std::string()});
        }
    }
    json m = base_manifest(
        "trajectory",
        {{"n", n}, {"k", k}, {"d", d}, {"t_max", t_max}, {"mode", mode}});
    m["timescales"] = timescale_json(p);
    finish_manifest(c, m, {sink.finish()});
    return 0;
}

int run_rates(const Common& c, int n, const std::string& klist, int d, int t_max) {
    const auto ks = parse_k_list(klist, n);
    RowSink sink(c, "rates", {"k", "t", "lambda_eff", "defined"});
    json ts_all;
    for (int k : ks) {
        auto p = make_params(n, k, d);
        auto rates = rate_trajectory(p, t_max);
        for (std::size_t t = 0; t < rates.size(); ++t)
            sink.row({k, static_cast<long>(t), rates[t].value,
                      static_cast<long>(rates[t].defined ? 1 : 0)});
        ts_all[std::to_string(k)] = timescale_json(p);
    }
    json m = base_manifest("rates",
                           {{"n", n}, {"k_list", klist}, {"d", d}, {"t_max", t_max}});
    m["timescales"] = ts_all;
    finish_manifest(c, m, {sink.finish()});
    return 0;
}

int run_coefficients(const Common& c, int n, int k, int d, const std::string& method) {
    auto p = make_params(n, k, d);
    auto cs = coefficients(p, method == "closed-form"
                                  ? CoeffMethod::closed_form_approx
                                  : CoeffMethod::exact_inner_product);
    RowSink sink(c, "coefficients",
                 {"j", "lambda_j", "sign_cj", "log10_abs_cj", "cj_float64"});
    for (int j = 1; j <= n / 2 - 1; ++j) {
        const auto& sl = cs.c[j - 1];
        auto e = eigen_pair(p, j);
        sink.row({j, e.lambda, sl.sign, sl.log10_abs,
                  sl.value ? json(*sl.value) : json(std::string())});
    }
    json m = base_manifest("coefficients",
                           {{"n", n}, {"k", k}, {"d", d}, {"method", method}});
    finish_manifest(c, m, {sink.finish()});
    return 0;
}

int run_magic_sums(const Common& c, int n, const std::string& klist, int p_min,
                   int p_max, bool exact) {
    const auto ks = parse_k_list(klist, n);
    RowSink sink(c, "magic_sums", {"k", "p", "f", "term_scale", "is_zero", "f_exact"});
    for (int k : ks) {
        for (int pw = p_min; pw <= p_max; ++pw) {
            auto f = magic_sum_f(n, k, pw);
            std::string ex;
            // the sum reduces to a rational exactly when p + k is odd (the
            // parity the purity series produces); other cells are algebraic
            if (exact && (pw + k) % 2 != 0) ex = magic_sum_f_exact(n, k, pw).str();
            sink.row(
                {k, pw, f.value, f.scale, static_cast<long>(f.zero() ? 1 : 0), ex});
        }
    }
    json m = base_manifest("magic-sums", {{"n", n},
                                          {"k_list", klist},
                                          {"p_min", p_min},
                                          {"p_max", p_max},
                                          {"exact", exact}});
    finish_manifest(c, m, {sink.finish()});
    return 0;
}

int run_kernel_check(const Common& c, int n, int d, bool all_k, int k_single,
                     double tol) {
    std::vector<CancellationReport> reports;
    if (all_k) {
        reports = cancellation_sweep(n, d, tol);
    } else {
        auto p = make_params(n, k_single, d);
        const int tK = timescales(p).t_kernel;
        for (int t = 0; t <= tK; ++t) reports.push_back(cancellation_check(p, t, tol));
    }
    RowSink sink(c, "kernel_check",
                 {"k", "t", "kernel", "spectral", "residual_rel", "pass",
                  "kernel_exact", "delta_iteration", "delta_series",
                  "series_rel_err"});
    int failures = 0;
    for (const auto& r : reports) {
        if (!r.pass) ++failures;
        sink.row({r.k, r.t, r.kernel, r.spectral, r.residual_rel,
                  static_cast<long>(r.pass ? 1 : 0), r.kernel_exact,
                  r.delta_iteration, r.delta_series, r.series_rel_err});
    }
    json m = base_manifest(
        "kernel-check",
        {{"n", n}, {"d", d}, {"all_k", all_k}, {"k", k_single}, {"tol", tol}});
    m["failures"] = failures;
    finish_manifest(c, m, {sink.finish()});
    if (failures > 0)
        std::cerr << "kernel-check: " << failures
                  << " cell(s) violate the cancellation at tol " << tol << "\n";
    return failures == 0 ? 0 : 1;
}

int run_theta(const Common& c, int n, int d, const std::string& curve, long t_min,
              long t_max, long t_step, bool with_exact) {
    const int k = curve == "k2" ? 2 : n / 2;
    auto p = make_params(n, k, d);
    std::vector<RateEntry> exact;
    if (with_exact) exact = rate_trajectory(p, static_cast<int>(t_max) + 1);
    const double lam1 = characteristic_rates(p).lambda_1;
    const long tc = n - k - 1;
    if (t_min < tc) t_min = tc;  // theory curves are defined from t_c on
    RowSink sink(c, "theta",
                 {"t", "theory", "regime", "asymptote_short", "asymptote_long",
                  "asymptote_long_exp", "exact_rate_minus_lambda1"});
    for (long t = t_min; t <= t_max; t += t_step) {
        const RateValue rv =
            curve == "k2" ? rate_transition_k2(p, t) : rate_transition_half(p, t);
        const auto s = curve == "k2" ? asymptote_k2(p, t, AsymRegime::short_time)
                                     : asymptote_half(p, t, AsymRegime::short_time);
        const auto l = curve == "k2" ? asymptote_k2(p, t, AsymRegime::long_time)
                                     : asymptote_half(p, t, AsymRegime::long_time);
        const char* reg = rv.regime == Regime::plateau
                              ? "plateau"
                              : rv.regime == Regime::transition ? "transition"
                                                                : "asymptotic";
        json ex;
        if (with_exact && t < static_cast<long>(exact.size()) && exact[t].defined)
            ex = exact[t].value - lam1;
        else
            ex = std::string();
        sink.row({static_cast<long>(t), rv.value, std::string(reg), s.value, l.value,
                  l.exp_form, ex});
    }
    json m = base_manifest("theta", {{"n", n},
                                     {"d", d},
                                     {"curve", curve},
                                     {"t_min", t_min},
                                     {"t_max", t_max},
                                     {"t_step", t_step},
                                     {"with_exact", with_exact}});
    m["timescales"] = timescale_json(p);
    finish_manifest(c, m, {sink.finish()});
    return 0;
}

int run_pseudospectrum(const Common& c, int n, int d, const std::string& eps_grid,
                       unsigned precision_bits, std::uint64_t seed, int realizations,
                       double real_threshold) {
    PerturbationConfig cfg;
    cfg.params = make_params(n, 2, d);
    cfg.eps_exponents = parse_eps_grid(eps_grid);
    cfg.seed = seed;
    cfg.realizations = realizations;
    cfg.precision_bits = precision_bits;
    cfg.real_threshold = real_threshold;
    auto res = sweep(cfg);
    RowSink spectra(c, "spectra", {"eps_exponent", "realization", "re", "im"});
    for (const auto& snap : res.snapshots)
        for (const auto& z : snap.eigenvalues)
            spectra.row({snap.eps_exponent, snap.realization, z.real(), z.imag()});
    RowSink summary(c, "summary",
                    {"eps_exponent", "realization", "real_count", "theory_count"});
    for (const auto& row : res.summary)
        summary.row(
            {row.eps_exponent, row.realization, row.real_count, row.theory_count});
    json m = base_manifest("pseudospectrum", {{"n", n},
                                              {"d", d},
                                              {"eps_exp", eps_grid},
                                              {"precision_bits", precision_bits},
                                              {"seed", seed},
                                              {"realizations", realizations},
                                              {"real_threshold", real_threshold}});
    finish_manifest(c, m, {spectra.finish(), summary.finish()});
    return 0;
}

int run_montecarlo(const Common& c, int n, int d, int t_max, int realizations,
                   std::uint64_t seed) {
    auto mc = mc_average(n, d, t_max, realizations, seed);
    auto p = make_params(n, 2, d);
    auto traj = iterate_trajectory<double>(p, t_max);
    RowSink sink(c, "montecarlo",
                 {"k", "t", "mean", "stderr", "realizations", "iteration",
                  "sigma_distance"});
    for (int k = 1; k <= n - 1; ++k)
        for (int t = 0; t <= t_max; ++t) {
            const auto& cell = mc.cell(k, t);
            json iter, sig;
            if (k >= 2) {
                const double exact = traj.steps[t][k - 1];
                iter = exact;
                if (cell.stderr_ > 0)
                    sig = (cell.mean - exact) / cell.stderr_;
                else
                    sig = 0.0;
            } else {
                iter = std::string();
                sig = std::string();
            }
            sink.row({k, t, cell.mean, cell.stderr_,
                      static_cast<long>(mc.realizations), iter, sig});
        }
    json m = base_manifest("montecarlo", {{"n", n},
                                          {"d", d},
                                          {"t_max", t_max},
                                          {"realizations", realizations},
                                          {"seed", seed}});
    finish_manifest(c, m, {sink.finish()});
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    if (const char* cap = std::getenv("PHANTOMLAB_THREADS")) {
        const int t = std::atoi(cap);
        if (t > 0) omp_set_num_threads(t);
    }

    CLI::App app{"phantomlab: staircase-circuit purity relaxation laboratory"};
    app.require_subcommand(1);

    Common c;
    int n = 20, k = 2, d = 2, t_max = 100, p_min = -4, p_max = 20;
    int realizations = 1;
    int mc_realizations = 1000;
    long lt_min = 0, lt_max = 400, lt_step = 1;
    unsigned precision_bits = 256;
    std::uint64_t seed = 1;
    double tol = 1e-10, real_threshold = 1e-6;
    std::string mode = "float64", klist = "2", method = "exact", curve = "k2";
    std::string eps_grid = "5:0.5:60";
    bool all_k = false, exact_sums = false, with_exact = false;

    auto even_n = CLI::Validator(
        [](std::string& s) {
            const int v = std::stoi(s);
            if (v < 4 || v % 2 != 0) return std::string("n must be even and >= 4");
            return std::string();
        },
        "EVEN_N");

    auto* traj =
        app.add_subcommand("trajectory", "purity trajectory for one bipartition");
    traj->add_option("--n", n, "qudit count")->required()->check(even_n);
    traj->add_option("--k", k, "bipartition index")->required();
    traj->add_option("--d", d, "local dimension")->required()->check(CLI::Range(2, 64));
    traj->add_option("--t-max", t_max)->capture_default_str();
    traj->add_option("--mode", mode)
        ->check(CLI::IsMember({"float64", "rational"}))
        ->capture_default_str();
    add_common(traj, c);

    auto* rates = app.add_subcommand("rates", "effective decay rates for a k list");
    rates->add_option("--n", n)->required()->check(even_n);
    rates->add_option("--k", klist, "comma-separated bipartitions")->required();
    rates->add_option("--d", d)->required()->check(CLI::Range(2, 64));
    rates->add_option("--t-max", t_max)->capture_default_str();
    add_common(rates, c);

    auto* coef = app.add_subcommand("coefficients", "spectral expansion coefficients");
    coef->add_option("--n", n)->required()->check(even_n);
    coef->add_option("--k", k)->required();
    coef->add_option("--d", d)->required()->check(CLI::Range(2, 64));
    coef->add_option("--method", method)
        ->check(CLI::IsMember({"exact", "closed-form"}))
        ->capture_default_str();
    add_common(coef, c);

    auto* magic = app.add_subcommand("magic-sums", "trigonometric sum table");
    magic->add_option("--n", n)->required()->check(even_n);
    magic->add_option("--k", klist)->required();
    magic->add_option("--p-min", p_min)->capture_default_str();
    magic->add_option("--p-max", p_max)->capture_default_str();
    magic->add_flag("--exact", exact_sums,
                    "also evaluate exactly in the cyclotomic field");
    add_common(magic, c);

    auto* kc =
        app.add_subcommand("kernel-check", "kernel/spectrum cancellation reports");
    kc->add_option("--n", n)->required()->check(even_n);
    kc->add_option("--d", d)->required()->check(CLI::Range(2, 64));
    kc->add_flag("--all-k", all_k, "sweep every bipartition");
    kc->add_option("--k", k, "single bipartition when --all-k is absent");
    kc->add_option("--tol", tol)->capture_default_str();
    add_common(kc, c);

    auto* th = app.add_subcommand("theta", "transition-curve theory data");
    th->add_option("--n", n)->required()->check(even_n);
    th->add_option("--d", d)->required()->check(CLI::Range(2, 64));
    th->add_option("--curve", curve)
        ->check(CLI::IsMember({"k2", "half"}))
        ->capture_default_str();
    th->add_option("--t-min", lt_min)->capture_default_str();
    th->add_option("--t-max", lt_max)->capture_default_str();
    th->add_option("--t-step", lt_step)->capture_default_str();
    th->add_flag("--with-exact", with_exact, "add the exact-iteration overlay");
    add_common(th, c);

    auto* ps = app.add_subcommand("pseudospectrum", "perturbed spectra sweep");
    ps->add_option("--n", n)->required()->check(even_n);
    ps->add_option("--d", d)->required()->check(CLI::Range(2, 64));
    ps->add_option("--eps-exp", eps_grid, "decimal exponents start:step:stop")
        ->capture_default_str();
    ps->add_option("--precision-bits", precision_bits)->capture_default_str();
    ps->add_option("--seed", seed)->capture_default_str();
    ps->add_option("--realizations", realizations)
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    ps->add_option("--real-threshold", real_threshold)->capture_default_str();
    add_common(ps, c);

    auto* mc = app.add_subcommand("montecarlo", "Haar-circuit oracle comparison");
    mc->add_option("--n", n)->required();
    mc->add_option("--d", d)->required()->check(CLI::Range(2, 8));
    mc->add_option("--t-max", t_max)->capture_default_str();
    mc->add_option("--realizations", mc_realizations)->capture_default_str();
    mc->add_option("--seed", seed)->capture_default_str();
    add_common(mc, c);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);  // prints the message / help
        return code == 0 ? 0 : 2;
    }

    try {
        if (traj->parsed()) return run_trajectory(c, n, k, d, t_max, mode);
        if (rates->parsed()) return run_rates(c, n, klist, d, t_max);
        if (coef->parsed()) return run_coefficients(c, n, k, d, method);
        if (magic->parsed())
            return run_magic_sums(c, n, klist, p_min, p_max, exact_sums);
        if (kc->parsed()) return run_kernel_check(c, n, d, all_k, k, tol);
        if (th->parsed())
            return run_theta(c, n, d, curve, lt_min, lt_max, lt_step, with_exact);
        if (ps->parsed())
            return run_pseudospectrum(c, n, d, eps_grid, precision_bits, seed,
                                      realizations, real_threshold);
        if (mc->parsed()) return run_montecarlo(c, n, d, t_max, mc_realizations, seed);
    } catch (const std::invalid_argument& e) {
        std::cerr << "phantomlab: invalid configuration: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "phantomlab: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
