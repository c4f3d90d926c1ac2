#pragma once

#include <cmath>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "permfree/gaussian.hpp"
#include "permfree/statistics.hpp"
#include "permfree/wick.hpp"

namespace permfree {

using Json = nlohmann::ordered_json;

/// JSON has no infinities: -inf becomes the string "-inf", NaN becomes null.
inline Json exponent_json(double e) {
    if (std::isnan(e)) return nullptr;
    if (std::isinf(e)) return e < 0 ? "-inf" : "inf";
    return e;
}

inline Json to_json(GrowthReport const& r) {
    Json grid = Json::array();
    for (auto const& g : r.grid) grid.push_back({{"N", g.side}, {"count", g.count}});
    return {{"labels", r.labels},
            {"kind", r.kind},
            {"grid", grid},
            {"exponent", exponent_json(r.fitted_exponent)},
            {"verdict", to_string(r.verdict)}};
}

inline Json to_json(std::vector<GrowthReport> const& reports) {
    Json out = Json::array();
    for (auto const& r : reports) out.push_back(to_json(r));
    return out;
}

inline Json blocks_json(PairPartition const& pi) {
    Json out = Json::array();
    for (auto [k, l] : pi.blocks()) out.push_back({k, l});
    return out;
}

/// {N, m, word, value, per_pairing: [{blocks, count, V}]}
inline Json to_json(ExactMoment const& e, std::string const& word) {
    Json terms = Json::array();
    for (auto const& t : e.terms) {
        terms.push_back({{"blocks", blocks_json(t.pairing)}, {"count", t.count.str()}, {"V", to_string(t.weight)}});
    }
    return {{"N", e.side},
            {"m", e.length},
            {"word", word},
            {"value", to_string(e.value)},
            {"value_decimal", to_double(e.value)},
            {"per_pairing", terms}};
}

inline Json to_json(MomentEstimate const& e) {
    return {{"N", e.side},
            {"samples", e.samples},
            {"mean_re", e.mean.real()},
            {"mean_im", e.mean.imag()},
            {"stderr_re", e.stderr_re},
            {"stderr_im", e.stderr_im},
            {"seed", e.seed}};
}

inline constexpr char const* study_csv_header = "N,samples,mean_re,mean_im,stderr_re,stderr_im,exact,prediction,seed";

/// One row of the study table. Monte Carlo columns stay empty when `mc` is null.
inline void write_study_row(std::ostream& out, int side, MomentEstimate const* mc, std::optional<Rational> const& exact,
                            std::optional<std::uint64_t> const& prediction, std::uint64_t seed) {
    auto const old = out.precision(17);
    out << side << ',';
    if (mc != nullptr) {
        out << mc->samples << ',' << mc->mean.real() << ',' << mc->mean.imag() << ',' << mc->stderr_re << ','
            << mc->stderr_im;
    } else {
        out << "0,,,,";
    }
    out << ',' << (exact ? to_string(*exact) : "") << ',' << (prediction ? std::to_string(*prediction) : "") << ','
        << seed << '\n';
    out.precision(old);
}

inline void write_study_csv(std::ostream& out, std::vector<StudyRow> const& rows) {
    out << study_csv_header << '\n';
    for (auto const& r : rows) write_study_row(out, r.estimate.side, &r.estimate, r.exact, r.prediction, r.estimate.seed);
}

} // namespace permfree
