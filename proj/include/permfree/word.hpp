#pragma once

#include <functional>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "permfree/error.hpp"
#include "permfree/pairing.hpp"
#include "permfree/schemes.hpp"

namespace permfree {

/// G^{mu} for the scheme named `label`, or its adjoint when `star` is set.
struct PermutedGaussian {
    std::string label;
    bool star = false;

    friend bool operator==(PermutedGaussian const&, PermutedGaussian const&) = default;
};

/// A deterministic matrix looked up by label in a ConstantLibrary.
struct ConstantMatrix {
    std::string label;
    bool star = false;

    friend bool operator==(ConstantMatrix const&, ConstantMatrix const&) = default;
};

using Factor = std::variant<PermutedGaussian, ConstantMatrix>;

/// An ordered product of factors, the argument of E o tr(.).
struct MomentWord {
    std::vector<Factor> factors;

    int size() const noexcept { return static_cast<int>(factors.size()); }

    bool constant_free() const {
        for (auto const& f : factors) {
            if (std::holds_alternative<ConstantMatrix>(f)) return false;
        }
        return true;
    }

    std::string to_string() const {
        std::string s;
        for (auto const& f : factors) {
            if (!s.empty()) s += ",";
            std::visit([&](auto const& x) { s += x.label + (x.star ? "*" : ""); }, f);
        }
        return s;
    }

    friend bool operator==(MomentWord const&, MomentWord const&) = default;
};

/// Labels parsed as constants rather than schemes.
inline bool is_reserved_constant(std::string const& label) { return label == "Z" || label == "T" || label == "I"; }

/**
 * Parses "a,b*,Z,..." : comma-separated labels, each with an optional
 * trailing '*'. Z, T and I denote constant matrices.
 */
inline MomentWord parse_word(std::string const& spec) {
    MomentWord w;
    std::size_t pos = 0;
    while (pos <= spec.size()) {
        auto const comma = spec.find(',', pos);
        std::string tok = spec.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
        auto const b = tok.find_first_not_of(" \t");
        auto const e = tok.find_last_not_of(" \t");
        tok = b == std::string::npos ? std::string{} : tok.substr(b, e - b + 1);
        bool star = false;
        if (!tok.empty() && tok.back() == '*') {
            star = true;
            tok.pop_back();
        }
        if (tok.empty()) throw InvalidArgument("word '" + spec + "': empty factor");
        if (tok.find('*') != std::string::npos) throw InvalidArgument("word '" + spec + "': misplaced '*'");
        if (is_reserved_constant(tok)) {
            w.factors.emplace_back(ConstantMatrix{tok, star});
        } else {
            w.factors.emplace_back(PermutedGaussian{tok, star});
        }
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return w;
}

using SchemeResolver = std::function<PermutationScheme(std::string const&)>;

inline SchemeResolver default_resolver() {
    return [](std::string const& name) { return scheme_from_name(name); };
}

/**
 * Limit signature of a constant-free word at side n: labels whose scheme is
 * symmetric at n are semicircular (their stars are dropped, G^{mu} being
 * selfadjoint), all others circular.
 */
inline WordSignature signature_at(MomentWord const& word, int side, SchemeResolver const& resolve) {
    std::vector<std::string> labels;
    std::vector<bool> stars;
    std::map<std::string, LimitKind> kinds;
    for (auto const& f : word.factors) {
        auto const* g = std::get_if<PermutedGaussian>(&f);
        if (g == nullptr) throw InvalidArgument("signature_at: word contains a constant matrix");
        if (kinds.count(g->label) == 0) {
            bool const sym = is_symmetric(resolve(g->label).build(side));
            kinds[g->label] = sym ? LimitKind::semicircular : LimitKind::circular;
        }
        labels.push_back(g->label);
        stars.push_back(kinds[g->label] == LimitKind::circular && g->star);
    }
    return WordSignature(std::move(labels), std::move(stars), std::move(kinds));
}

} // namespace permfree
