#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "permfree/gaussian.hpp"
#include "permfree/report.hpp"
#include "permfree/schemes.hpp"
#include "permfree/statistics.hpp"
#include "permfree/wick.hpp"
#include "permfree/word.hpp"

namespace permfree {

enum ExitCode : int { exit_pass = 0, exit_failure = 1, exit_usage = 2, exit_budget = 3 };

/// Bad flags or flag combinations.
class UsageError : public InvalidArgument {
public:
    using InvalidArgument::InvalidArgument;
};

struct ExperimentConfig {
    std::string command;
    /// certify: "label:kind,..." with kind sym or jsmall.
    std::string schemes;
    std::string word;
    /// predict: "a:semi,c:circ".
    std::string kinds;
    /// reproduce: trio, remark41, remark42 or transpose-tensor.
    std::string bundle;
    std::vector<int> grid;
    std::optional<int> side;
    std::optional<std::uint64_t> samples;
    std::uint64_t seed = 20240617;
    std::uint64_t budget = WickBudget{}.max_checks;
    unsigned threads = std::max(1u, std::thread::hardware_concurrency());
    bool exact = false;
    bool mc = false;
    /// json, csv or text; empty selects the command's default.
    std::string format;
    /// Empty writes to the caller's stream.
    std::string output;
};

inline Json config_json(ExperimentConfig const& c) {
    Json j = {{"command", c.command}};
    if (!c.schemes.empty()) j["schemes"] = c.schemes;
    if (!c.word.empty()) j["word"] = c.word;
    if (!c.kinds.empty()) j["kinds"] = c.kinds;
    if (!c.bundle.empty()) j["bundle"] = c.bundle;
    if (!c.grid.empty()) j["grid"] = c.grid;
    if (c.side) j["n"] = *c.side;
    if (c.samples) j["samples"] = *c.samples;
    j["seed"] = c.seed;
    j["budget"] = c.budget;
    j["threads"] = c.threads;
    if (c.exact) j["exact"] = true;
    if (c.mc) j["mc"] = true;
    return j;
}

// ---------------------------------------------------------------------------
// Flag value parsing.

inline std::vector<std::string> split(std::string const& s, char sep) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, sep)) {
        auto const b = item.find_first_not_of(" \t");
        auto const e = item.find_last_not_of(" \t");
        out.push_back(b == std::string::npos ? std::string{} : item.substr(b, e - b + 1));
    }
    return out;
}

inline std::vector<int> parse_int_list(std::string const& s) {
    std::vector<int> out;
    for (auto const& tok : split(s, ',')) {
        std::size_t used = 0;
        int v = 0;
        try {
            v = std::stoi(tok, &used);
        } catch (std::exception const&) {
            used = 0;
        }
        if (tok.empty() || used != tok.size() || v < 1) throw UsageError("bad side '" + tok + "' in '" + s + "'");
        out.push_back(v);
    }
    if (out.empty()) throw UsageError("empty side list");
    return out;
}

/// "id:sym,gamma:sym,mix:jsmall". The kind follows the last colon, so tensor:... and custom:... names work.
inline std::vector<DeclaredScheme> parse_declared_schemes(std::string const& spec,
                                                          SchemeResolver const& resolve = default_resolver()) {
    std::vector<DeclaredScheme> out;
    for (auto const& tok : split(spec, ',')) {
        auto const colon = tok.rfind(':');
        if (colon == std::string::npos || colon == 0) {
            throw UsageError("scheme spec '" + tok + "' needs a kind suffix (:sym or :jsmall)");
        }
        std::string const name = tok.substr(0, colon);
        std::string const kind = tok.substr(colon + 1);
        DeclaredKind k;
        if (kind == "sym" || kind == "symmetric") {
            k = DeclaredKind::symmetric;
        } else if (kind == "jsmall" || kind == "j-small") {
            k = DeclaredKind::j_small;
        } else {
            throw UsageError("scheme spec '" + tok + "': unknown kind '" + kind + "' (expected sym or jsmall)");
        }
        try {
            out.push_back({resolve(name), k});
        } catch (InadmissibleSize const&) {
            throw;
        } catch (Error const& e) {
            throw UsageError(e.what());
        }
    }
    if (out.empty()) throw UsageError("no schemes given");
    return out;
}

/// "a:semi,c:circ".
inline std::map<std::string, LimitKind> parse_kinds(std::string const& spec) {
    std::map<std::string, LimitKind> out;
    for (auto const& tok : split(spec, ',')) {
        auto const colon = tok.rfind(':');
        if (colon == std::string::npos || colon == 0) throw UsageError("kind spec '" + tok + "' must be label:kind");
        std::string const kind = tok.substr(colon + 1);
        if (kind == "semi" || kind == "semicircular") {
            out[tok.substr(0, colon)] = LimitKind::semicircular;
        } else if (kind == "circ" || kind == "circular") {
            out[tok.substr(0, colon)] = LimitKind::circular;
        } else {
            throw UsageError("kind spec '" + tok + "': expected semi or circ");
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Output plumbing.

/// Writes to cfg.output when set, otherwise to `fallback`.
class OutputSink {
public:
    OutputSink(std::string const& path, std::ostream& fallback) : out_(&fallback) {
        if (!path.empty()) {
            file_.open(path);
            if (!file_) throw UsageError("cannot open output file '" + path + "'");
            out_ = &file_;
        }
    }
    std::ostream& stream() { return *out_; }

private:
    std::ofstream file_;
    std::ostream* out_;
};

inline std::string resolve_format(ExperimentConfig const& cfg, std::string const& fallback,
                                  std::vector<std::string> const& allowed) {
    std::string const f = cfg.format.empty() ? fallback : cfg.format;
    if (std::find(allowed.begin(), allowed.end(), f) == allowed.end()) {
        throw UsageError("format '" + f + "' is not supported by " + cfg.command);
    }
    return f;
}

inline std::string fixed(double v, int digits = 6) {
    std::ostringstream s;
    s << std::setprecision(digits) << v;
    return s.str();
}

// ---------------------------------------------------------------------------
// certify

inline int cmd_certify(ExperimentConfig const& cfg, std::ostream& out, std::ostream& err) {
    if (cfg.schemes.empty()) throw UsageError("certify needs --schemes");
    if (cfg.grid.empty()) throw UsageError("certify needs --grid");
    std::string const format = resolve_format(cfg, "json", {"json", "csv"});
    auto const family = parse_declared_schemes(cfg.schemes);
    auto const reports = certify_family(family, cfg.grid);
    bool const passed = all_satisfied(reports);

    OutputSink sink(cfg.output, out);
    if (format == "json") {
        Json j = {{"config", config_json(cfg)}, {"reports", to_json(reports)}, {"passed", passed}};
        sink.stream() << j.dump(2) << '\n';
    } else {
        sink.stream() << "labels,kind,N,count,exponent,verdict\n";
        for (auto const& r : reports) {
            std::string labels;
            for (auto const& l : r.labels) labels += (labels.empty() ? "" : "|") + l;
            Json const e = exponent_json(r.fitted_exponent);
            std::string const exponent = e.is_null() ? "nan" : e.is_string() ? e.get<std::string>() : fixed(r.fitted_exponent);
            for (auto const& g : r.grid) {
                sink.stream() << labels << ',' << r.kind << ',' << g.side << ',' << g.count << ',' << exponent << ','
                              << to_string(r.verdict) << '\n';
            }
        }
    }
    for (auto const& r : reports) {
        if (r.verdict == Verdict::satisfies) continue;
        err << to_string(r.verdict) << ": " << r.kind << " (";
        for (std::size_t i = 0; i < r.labels.size(); ++i) err << (i ? ", " : "") << r.labels[i];
        err << "), fitted exponent " << fixed(r.fitted_exponent, 4) << '\n';
    }
    return passed ? exit_pass : exit_failure;
}

// ---------------------------------------------------------------------------
// moment

/// |re - exact| <= 5 se_re and |im| <= 5 se_im.
inline bool within_five_stderr(MomentEstimate const& e, double exact) {
    double const slack = 1e-12;
    return std::abs(e.mean.real() - exact) <= 5.0 * e.stderr_re + slack &&
           std::abs(e.mean.imag()) <= 5.0 * e.stderr_im + slack;
}

inline int cmd_moment(ExperimentConfig const& cfg, std::ostream& out, std::ostream& err) {
    if (cfg.word.empty()) throw UsageError("moment needs --word");
    std::vector<int> const grid = cfg.side ? std::vector<int>{*cfg.side} : cfg.grid;
    if (grid.empty()) throw UsageError("moment needs --grid or --n");
    std::string const format = resolve_format(cfg, "csv", {"json", "csv"});
    MomentWord const word = parse_word(cfg.word);
    bool exact = cfg.exact;
    bool mc = cfg.mc;
    if (!exact && !mc) (word.constant_free() ? exact : mc) = true;
    if (exact && !word.constant_free()) throw UsageError("--exact needs a word without constant matrices");
    std::uint64_t const samples = cfg.samples.value_or(10000);
    if (mc && samples < 2) throw UsageError("--samples must be at least 2");

    MonteCarloOptions options;
    options.threads = cfg.threads;
    bool agree = true;
    Json rows = Json::array();
    std::ostringstream csv;
    csv << study_csv_header << '\n';
    for (int side : grid) {
        std::optional<ExactMoment> ex;
        std::optional<MomentEstimate> est;
        std::optional<std::uint64_t> prediction;
        if (exact) ex = exact_moment(word, side, WickBudget{cfg.budget});
        if (mc) est = mc_moment(word, side, samples, cfg.seed, options);
        if (word.constant_free()) prediction = free_limit_prediction(signature_at(word, side, options.resolve));

        Json row = {{"N", side}};
        if (ex) row["exact"] = to_json(*ex, word.to_string());
        if (est) row["mc"] = to_json(*est);
        if (prediction) row["prediction"] = *prediction;
        if (ex && est) {
            bool const ok = within_five_stderr(*est, to_double(ex->value));
            row["mc_within_5_stderr"] = ok;
            if (!ok) {
                err << "tolerance failure at N=" << side << ": Monte Carlo " << fixed(est->mean.real()) << " vs exact "
                    << to_string(ex->value) << " (stderr " << fixed(est->stderr_re) << ")\n";
            }
            agree = agree && ok;
        }
        rows.push_back(row);
        write_study_row(csv, side, est ? &*est : nullptr, ex ? std::optional<Rational>(ex->value) : std::nullopt,
                        prediction, cfg.seed);
    }
    OutputSink sink(cfg.output, out);
    if (format == "json") {
        sink.stream() << Json{{"config", config_json(cfg)}, {"rows", rows}}.dump(2) << '\n';
    } else {
        sink.stream() << csv.str();
    }
    return agree ? exit_pass : exit_failure;
}

// ---------------------------------------------------------------------------
// predict

/// #NC_2 pairings compatible with the word's labels and stars, for abstract labels.
inline std::uint64_t predict_word(std::string const& word_spec, std::string const& kinds_spec) {
    MomentWord const word = parse_word(word_spec);
    std::vector<std::string> labels;
    std::vector<bool> stars;
    for (auto const& f : word.factors) {
        std::visit(
            [&](auto const& x) {
                labels.push_back(x.label);
                stars.push_back(x.star);
            },
            f);
    }
    return free_limit_prediction(WordSignature(labels, stars, parse_kinds(kinds_spec)));
}

inline int cmd_predict(ExperimentConfig const& cfg, std::ostream& out, std::ostream&) {
    if (cfg.word.empty()) throw UsageError("predict needs --word");
    if (cfg.kinds.empty()) throw UsageError("predict needs --kinds");
    std::string const format = resolve_format(cfg, "text", {"text", "json", "csv"});
    std::uint64_t const value = predict_word(cfg.word, cfg.kinds);
    OutputSink sink(cfg.output, out);
    if (format == "json") {
        sink.stream() << Json{{"config", config_json(cfg)}, {"word", cfg.word}, {"prediction", value}}.dump(2) << '\n';
    } else if (format == "csv") {
        sink.stream() << "word,prediction\n\"" << cfg.word << "\"," << value << '\n';
    } else {
        sink.stream() << value << '\n';
    }
    return exit_pass;
}

// ---------------------------------------------------------------------------
// reproduce

struct SubCheck {
    std::string name;
    std::string target;
    std::string value;
    std::string tolerance;
    bool passed = false;
};

struct BundleResult {
    std::string bundle;
    std::vector<SubCheck> checks;
    std::vector<GrowthReport> reports;

    bool passed() const {
        return std::all_of(checks.begin(), checks.end(), [](SubCheck const& c) { return c.passed; });
    }
};

namespace detail {

inline std::string joined(std::vector<std::string> const& labels) {
    std::string s;
    for (auto const& l : labels) s += (s.empty() ? "" : ",") + l;
    return s;
}

/// One sub-check per report, passing when the verdict matches the expectation for its kind.
inline void expect_verdicts(BundleResult& r, std::vector<GrowthReport> const& reports,
                            std::function<Verdict(GrowthReport const&)> const& expected) {
    for (auto const& rep : reports) {
        Verdict const want = expected(rep);
        r.checks.push_back({rep.kind + "(" + joined(rep.labels) + ")", std::string("verdict ") + to_string(want),
                            std::string(to_string(rep.verdict)) + ", exponent " + fixed(rep.fitted_exponent, 4),
                            "margin " + fixed(growth_margin), rep.verdict == want});
        r.reports.push_back(rep);
    }
}

inline SubCheck near_check(std::string name, MomentEstimate const& e, double target, std::string const& target_text) {
    double const tol = std::max(5.0 * e.stderr_re, 0.05);
    return {std::move(name), target_text, fixed(e.mean.real()) + " (stderr " + fixed(e.stderr_re, 3) + ")",
            "max(5*stderr, 0.05) = " + fixed(tol, 4), std::abs(e.mean.real() - target) <= tol};
}

inline void exact_vs_mc(BundleResult& r, std::vector<std::string> const& words, int side, std::uint64_t samples,
                        std::uint64_t seed, unsigned threads, std::uint64_t budget) {
    std::vector<MomentWord> parsed;
    for (auto const& w : words) parsed.push_back(parse_word(w));
    MonteCarloOptions options;
    options.threads = threads;
    auto const est = mc_moments(parsed, side, samples, seed, options);
    for (std::size_t i = 0; i < words.size(); ++i) {
        Rational const ex = exact_moment(parsed[i], side, WickBudget{budget}).value;
        r.checks.push_back({"E tr(" + words[i] + ") at N=" + std::to_string(side), "exact " + to_string(ex),
                            fixed(est[i].mean.real()) + (est[i].mean.imag() < 0 ? "" : "+") +
                                fixed(est[i].mean.imag()) + "i",
                            "5*stderr = " + fixed(5 * est[i].stderr_re, 3), within_five_stderr(est[i], to_double(ex))});
    }
}

/// Exact values over the grid: gap to the free prediction decreasing and at most 0.05 at the end.
inline void limit_trend(BundleResult& r, std::string const& word_spec, std::vector<int> const& grid,
                        std::uint64_t budget) {
    auto const rows = asymptotic_check(parse_word(word_spec), grid, WickBudget{budget});
    std::string values;
    bool decreasing = true;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        values += (i ? ", " : "") + to_string(rows[i].value);
        if (i > 0) decreasing = decreasing && rows[i].gap < rows[i - 1].gap;
    }
    r.checks.push_back({"exact E tr(" + word_spec + ") over N=" + detail::joined([&] {
                            std::vector<std::string> s;
                            for (int n : grid) s.push_back(std::to_string(n));
                            return s;
                        }()),
                        "-> " + std::to_string(rows.back().prediction), values,
                        "gap decreasing, final gap " + fixed(rows.back().gap, 4) + " <= 0.05",
                        decreasing && rows.back().gap <= 0.05});
}

inline std::vector<int> grid_or(ExperimentConfig const& cfg, std::vector<int> fallback) {
    return cfg.grid.empty() ? std::move(fallback) : cfg.grid;
}

} // namespace detail

/// G, G^Gamma and G^M: all freeness hypotheses hold, and exact moments match Monte Carlo.
inline BundleResult reproduce_trio(ExperimentConfig const& cfg) {
    BundleResult r{"trio", {}, {}};
    auto const reports = certify_family(parse_declared_schemes("id:sym,gamma:sym,mix:jsmall"),
                                        detail::grid_or(cfg, {4, 9, 16, 25}));
    detail::expect_verdicts(r, reports, [](GrowthReport const&) { return Verdict::satisfies; });
    detail::exact_vs_mc(r, {"id,gamma,id,gamma", "mix,mix*,mix,mix*", "id,gamma,mix,mix*,gamma,id"},
                        cfg.side.value_or(16), cfg.samples.value_or(10000), cfg.seed, cfg.threads, cfg.budget);
    return r;
}

/**
 * The corner-shift pair: each G^{mu} has j growing like side^2 while the pair
 * satisfies the cross condition, and the joint moments are not those of a
 * free pair.
 */
inline BundleResult reproduce_remark41(ExperimentConfig const& cfg) {
    BundleResult r{"remark41", {}, {}};
    auto const reports = certify_family(parse_declared_schemes("r41a:jsmall,r41b:jsmall"),
                                        detail::grid_or(cfg, {8, 16, 32}));
    detail::expect_verdicts(r, reports, [](GrowthReport const& rep) {
        return rep.kind == "condition-ii" ? Verdict::satisfies : Verdict::violates;
    });

    int const side = cfg.side.value_or(256);
    if (side % 2 != 0) throw UsageError("remark41 needs an even side, got " + std::to_string(side));
    std::uint64_t const samples = cfg.samples.value_or(10000);
    MonteCarloOptions options;
    options.threads = cfg.threads;
    auto const est = mc_moments({parse_word("r41a,r41a"), parse_word("r41b,r41b"), parse_word("r41a,r41a,r41b,r41b"),
                                 parse_word("r41a,Z,r41a,T")},
                                side, samples, cfg.seed, options);
    auto const& a2 = est[0];
    auto const& b2 = est[1];
    auto const& a2b2 = est[2];
    auto const& azat = est[3];
    std::string const at = " at N=" + std::to_string(side);
    r.checks.push_back(detail::near_check("tr(A^2)" + at, a2, 0.75, "3/4"));
    r.checks.push_back(detail::near_check("tr(B^2)" + at, b2, 0.75, "3/4"));
    r.checks.push_back(detail::near_check("tr(A^2 B^2)" + at, a2b2, 0.625, "5/8"));
    r.checks.push_back(detail::near_check("tr(A Z A T)" + at, azat, 0.25, "1/4"));

    double const product = a2.mean.real() * b2.mean.real();
    double const tol = 5.0 * (a2b2.stderr_re + std::abs(b2.mean.real()) * a2.stderr_re +
                              std::abs(a2.mean.real()) * b2.stderr_re);
    r.checks.push_back({"tr(A^2 B^2) - tr(A^2) tr(B^2)" + at, "nonzero (free pair gives 0)",
                        fixed(a2b2.mean.real() - product), "> " + fixed(tol, 4),
                        std::abs(a2b2.mean.real() - product) > tol});
    r.checks.push_back({"tr(A Z A T) - tr(Z) tr(A^2) tr(T)" + at, "nonzero (free from constants gives 0)",
                        fixed(azat.mean.real()), "> 5*stderr = " + fixed(5 * azat.stderr_re, 4),
                        std::abs(azat.mean.real()) > 5 * azat.stderr_re});
    return r;
}

/// The column shift tau: j(tau : tau) is small, but the pair (id, tau) breaks the cross condition.
inline BundleResult reproduce_remark42(ExperimentConfig const& cfg) {
    BundleResult r{"remark42", {}, {}};
    auto const grid = detail::grid_or(cfg, {8, 16, 32});
    auto const reports = certify_family(parse_declared_schemes("id:sym,r42:jsmall"), grid);
    detail::expect_verdicts(r, reports, [](GrowthReport const& rep) {
        return rep.kind == "condition-ii" ? Verdict::violates : Verdict::satisfies;
    });
    for (auto const& rep : reports) {
        if (rep.kind != "condition-ii") continue;
        bool big = true;
        std::string counts;
        for (auto const& g : rep.grid) {
            big = big && g.count >= static_cast<std::uint64_t>(g.side) * g.side;
            counts += (counts.empty() ? "" : ", ") + std::to_string(g.count);
        }
        r.checks.push_back({"condition-ii(" + detail::joined(rep.labels) + ") counts", ">= N^2 at every N", counts,
                            "exact", big});
    }
    detail::limit_trend(r, "id,r42,id,r42*", {4, 8, 16, 32, 64, 128}, cfg.budget);
    return r;
}

/// G, its transpose and a tensor permutation with fixed-point-free factors.
inline BundleResult reproduce_transpose_tensor(ExperimentConfig const& cfg) {
    BundleResult r{"transpose-tensor", {}, {}};
    auto const grid = detail::grid_or(cfg, {8, 16, 32});
    std::string const phi_name = "shift1";
    std::string const psi_name = "shift2";
    std::string const tensor_name = "tensor:" + phi_name + "/" + psi_name;
    auto const tensor = scheme_from_name(tensor_name);
    PermutationScheme const tensor_t(tensor_name + ".t", "all", [](int) { return true; },
                                     [tensor](int n) { return compose(tensor.build(n), transpose_perm(n)); });
    std::vector<DeclaredScheme> family = parse_declared_schemes("id:sym,t:sym," + tensor_name + ":jsmall");
    family.push_back({tensor_t, DeclaredKind::j_small});
    detail::expect_verdicts(r, certify_family(family, grid),
                            [](GrowthReport const&) { return Verdict::satisfies; });

    // Fixed points of phi, psi and phi^{-1} psi must be o(N).
    LineRule const phi = line_rule_from_name(phi_name);
    LineRule const psi = line_rule_from_name(psi_name);
    LineRule const id = line_rule_from_name("id");
    std::vector<std::pair<std::string, std::function<std::uint64_t(int)>>> fixed_points = {
        {"fix(" + phi_name + ")", [&](int n) { return c_statistic(phi(n), id(n)); }},
        {"fix(" + psi_name + ")", [&](int n) { return c_statistic(psi(n), id(n)); }},
        {"fix(" + phi_name + "^-1 " + psi_name + ")", [&](int n) { return c_statistic(phi(n), psi(n)); }},
    };
    for (auto const& [name, count] : fixed_points) {
        GrowthReport rep;
        rep.labels = {name};
        rep.kind = "c-small";
        for (int n : grid) rep.grid.push_back({n, count(n)});
        rep.verdict = assess_growth(rep.grid, 1.0, rep.fitted_exponent);
        detail::expect_verdicts(r, {rep}, [](GrowthReport const&) { return Verdict::satisfies; });
    }

    // j against a transposed tensor permutation is exactly N, and t-conjugation swaps the factors.
    LineRule const phi2 = line_rule_from_name("rev");
    LineRule const psi2 = line_rule_from_name("shift3");
    bool j_ok = true;
    bool swap_ok = true;
    std::string values;
    for (int n : grid) {
        auto const a = tensor_perm(phi(n), psi(n));
        auto const b = tensor_perm(phi2(n), psi2(n));
        auto const left = j_statistic(a, compose(transpose_perm(n), b));
        auto const right = j_statistic(a, compose(b, transpose_perm(n)));
        j_ok = j_ok && left == static_cast<std::uint64_t>(n) && right == static_cast<std::uint64_t>(n);
        values += (values.empty() ? "" : "; ") + std::to_string(left) + "," + std::to_string(right);
        swap_ok = swap_ok && conjugate_by_t(a) == tensor_perm(psi(n), phi(n));
    }
    r.checks.push_back({"j(phi x psi : t o (rev x shift3)), j(phi x psi : (rev x shift3) o t)", "N at every N", values,
                        "exact", j_ok});
    r.checks.push_back({"t o (phi x psi) o t", "psi x phi", swap_ok ? "psi x phi" : "differs", "exact", swap_ok});
    detail::limit_trend(r, "id,t,id,t", {4, 8, 16, 32, 64}, cfg.budget);
    detail::limit_trend(r, "id," + tensor_name + ",id," + tensor_name + "*", {4, 8, 16, 32, 64}, cfg.budget);
    return r;
}

inline BundleResult run_bundle(ExperimentConfig const& cfg) {
    if (cfg.bundle == "trio") return reproduce_trio(cfg);
    if (cfg.bundle == "remark41") return reproduce_remark41(cfg);
    if (cfg.bundle == "remark42") return reproduce_remark42(cfg);
    if (cfg.bundle == "transpose-tensor") return reproduce_transpose_tensor(cfg);
    throw UsageError("unknown bundle '" + cfg.bundle + "' (expected trio, remark41, remark42 or transpose-tensor)");
}

inline int cmd_reproduce(ExperimentConfig const& cfg, std::ostream& out, std::ostream&) {
    std::string const format = resolve_format(cfg, "text", {"text", "json"});
    BundleResult const r = run_bundle(cfg);
    OutputSink sink(cfg.output, out);
    if (format == "json") {
        Json checks = Json::array();
        for (auto const& c : r.checks) {
            checks.push_back({{"name", c.name},
                              {"target", c.target},
                              {"value", c.value},
                              {"tolerance", c.tolerance},
                              {"verdict", c.passed ? "pass" : "fail"}});
        }
        sink.stream() << Json{{"config", config_json(cfg)},
                              {"bundle", r.bundle},
                              {"checks", checks},
                              {"reports", to_json(r.reports)},
                              {"passed", r.passed()}}
                             .dump(2)
                      << '\n';
    } else {
        for (auto const& c : r.checks) {
            sink.stream() << (c.passed ? "PASS" : "FAIL") << "  " << c.name << "\n      target " << c.target
                          << " | value " << c.value << " | tolerance " << c.tolerance << '\n';
        }
        sink.stream() << r.bundle << ": " << (r.passed() ? "pass" : "fail") << '\n';
    }
    return r.passed() ? exit_pass : exit_failure;
}

// ---------------------------------------------------------------------------

/// Runs one command and maps errors to exit codes: 2 for bad input, 3 for an exhausted budget.
inline int run_command(ExperimentConfig const& cfg, std::ostream& out, std::ostream& err) {
    try {
        if (cfg.command == "certify") return cmd_certify(cfg, out, err);
        if (cfg.command == "moment") return cmd_moment(cfg, out, err);
        if (cfg.command == "predict") return cmd_predict(cfg, out, err);
        if (cfg.command == "reproduce") return cmd_reproduce(cfg, out, err);
        throw UsageError("unknown command '" + cfg.command + "'");
    } catch (BudgetExceeded const& e) {
        err << "error: " << e.what() << '\n';
        return exit_budget;
    } catch (std::exception const& e) {
        err << "error: " << e.what() << '\n';
        return exit_usage;
    }
}

} // namespace permfree
