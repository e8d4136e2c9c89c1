#pragma once

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "slq/coefficients.hpp"
#include "slq/error.hpp"

namespace slq {

/// A coefficient set together with the working interval [domain_lo, domain_hi].
struct Problem {
    CoefficientSet coeffs;
    double domain_lo = 0.0;
    double domain_hi = 1.0;
};

namespace detail {

inline std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

inline std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= s.size(); ++i) {
        if (i == s.size() || s[i] == sep) {
            out.push_back(trim(s.substr(start, i - start)));
            start = i + 1;
        }
    }
    return out;
}

inline std::vector<std::string> split_ws(std::string_view s) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
        std::size_t start = i;
        while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i]))) ++i;
        if (i > start) out.push_back(std::string(s.substr(start, i - start)));
    }
    return out;
}

inline double parse_real(const std::string& tok, std::size_t line) {
    double v = 0.0;
    const char* b = tok.data();
    const char* e = b + tok.size();
    auto res = std::from_chars(b, e, v);
    if (res.ec != std::errc{} || res.ptr != e)
        throw ParseError("problem file line " + std::to_string(line) + ": malformed number '" + tok + "'", line);
    if (!std::isfinite(v))
        throw ParseError("problem file line " + std::to_string(line) + ": number not finite", line);
    return v;
}

inline std::string format_real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// "b1 b2 ... | expr0 ; expr1 ; ..." with an optional empty breakpoint list.
inline PiecewiseFn parse_piecewise_body(const std::string& body, std::size_t line) {
    const std::size_t bar = body.find('|');
    if (bar == std::string::npos)
        throw ParseError("problem file line " + std::to_string(line) +
                             ": piecewise needs 'breakpoints | expr ; expr ; ...'",
                         line);
    std::vector<double> breaks;
    for (const auto& tok : split_ws(body.substr(0, bar))) breaks.push_back(parse_real(tok, line));
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i)
        if (!(breaks[i] < breaks[i + 1]))
            throw ParseError("problem file line " + std::to_string(line) + ": breakpoints not increasing", line);

    std::vector<Expr> segs;
    for (const auto& src : split(body.substr(bar + 1), ';')) {
        if (src.empty())
            throw ParseError("problem file line " + std::to_string(line) + ": empty segment expression", line);
        try {
            segs.push_back(Expr::parse(src));
        } catch (const ParseError& e) {
            throw ParseError("problem file line " + std::to_string(line) + ": " + e.what(), line);
        }
    }
    if (segs.size() != breaks.size() + 1)
        throw ParseError("problem file line " + std::to_string(line) + ": expected " +
                             std::to_string(breaks.size() + 1) + " segments, got " + std::to_string(segs.size()),
                         line);
    return PiecewiseFn(std::move(breaks), std::move(segs));
}

inline GrowthTag parse_growth_tag(const std::vector<std::string>& toks, std::size_t line) {
    if (toks.empty())
        throw ParseError("problem file line " + std::to_string(line) + ": missing growth class", line);
    GrowthTag tag;
    const std::string& cls = toks[0];
    auto need_value = [&](GrowthClass c) {
        if (toks.size() != 2)
            throw ParseError("problem file line " + std::to_string(line) + ": '" + cls + "' needs one value", line);
        tag.cls = c;
        tag.value = parse_real(toks[1], line);
    };
    if (cls == "power") need_value(GrowthClass::Power);
    else if (cls == "exponential") need_value(GrowthClass::Exponential);
    else if (cls == "bounded" && toks.size() == 1) tag.cls = GrowthClass::Bounded;
    else if (cls == "unspecified" && toks.size() == 1) tag.cls = GrowthClass::Unspecified;
    else
        throw ParseError("problem file line " + std::to_string(line) + ": bad growth tag '" + cls + "'", line);
    return tag;
}

} // namespace detail

/// Parses the line-oriented problem format. `#` starts a comment; see the
/// README for the full syntax. Throws ParseError with a line number.
inline Problem parse_problem(std::string_view text) {
    Problem prob;
    bool have_domain = false, have_p = false;
    bool have_q = false, have_jump = false, have_s = false, have_r = false;
    bool have_gp = false, have_gm = false;

    std::size_t line_no = 0;
    std::istringstream in{std::string(text)};
    std::string raw;
    while (std::getline(in, raw)) {
        ++line_no;
        const std::size_t hash = raw.find('#');
        if (hash != std::string::npos) raw.erase(hash);
        const std::string lineText = detail::trim(raw);
        if (lineText.empty()) continue;

        std::istringstream ls(lineText);
        std::string key;
        ls >> key;
        std::string rest;
        std::getline(ls, rest);
        rest = detail::trim(rest);

        auto dup = [&](bool& flag, const char* what) {
            if (flag)
                throw ParseError("problem file line " + std::to_string(line_no) + ": duplicate '" +
                                     std::string(what) + "' line",
                                 line_no);
            flag = true;
        };

        if (key == "domain") {
            dup(have_domain, "domain");
            auto toks = detail::split_ws(rest);
            if (toks.size() != 2)
                throw ParseError("problem file line " + std::to_string(line_no) + ": domain needs two numbers",
                                 line_no);
            prob.domain_lo = detail::parse_real(toks[0], line_no);
            prob.domain_hi = detail::parse_real(toks[1], line_no);
            if (!(prob.domain_lo < prob.domain_hi))
                throw ParseError("problem file line " + std::to_string(line_no) + ": domain must satisfy a < b",
                                 line_no);
        } else if (key == "p" || key == "Q.ac" || key == "s" || key == "r") {
            auto toks = detail::split_ws(rest);
            if (toks.empty() || toks[0] != "piecewise")
                throw ParseError("problem file line " + std::to_string(line_no) + ": expected 'piecewise' after '" +
                                     key + "'",
                                 line_no);
            const std::string body = detail::trim(rest.substr(rest.find("piecewise") + 9));
            PiecewiseFn fn = detail::parse_piecewise_body(body, line_no);
            if (key == "p") {
                dup(have_p, "p");
                prob.coeffs.p = std::move(fn);
            } else if (key == "Q.ac") {
                dup(have_q, "Q.ac");
                prob.coeffs.Q_ac = std::move(fn);
            } else if (key == "s") {
                dup(have_s, "s");
                prob.coeffs.s = std::move(fn);
            } else {
                dup(have_r, "r");
                prob.coeffs.r = std::move(fn);
            }
        } else if (key == "Q.jump") {
            dup(have_jump, "Q.jump");
            std::vector<std::pair<double, double>> jumps;
            for (const auto& item : detail::split(rest, ';')) {
                auto toks = detail::split_ws(item);
                if (toks.size() != 2)
                    throw ParseError("problem file line " + std::to_string(line_no) +
                                         ": each jump needs 'location height'",
                                     line_no);
                jumps.emplace_back(detail::parse_real(toks[0], line_no), detail::parse_real(toks[1], line_no));
            }
            for (std::size_t i = 0; i + 1 < jumps.size(); ++i)
                if (!(jumps[i].first < jumps[i + 1].first))
                    throw ParseError("problem file line " + std::to_string(line_no) +
                                         ": jump locations not increasing",
                                     line_no);
            prob.coeffs.Q_jump = StepFn(std::move(jumps));
        } else if (key == "p.growth") {
            auto toks = detail::split_ws(rest);
            if (toks.empty())
                throw ParseError("problem file line " + std::to_string(line_no) + ": p.growth needs a direction",
                                 line_no);
            const std::string dir = toks[0];
            toks.erase(toks.begin());
            if (dir == "plus") {
                dup(have_gp, "p.growth plus");
                prob.coeffs.p_growth_plus = detail::parse_growth_tag(toks, line_no);
            } else if (dir == "minus") {
                dup(have_gm, "p.growth minus");
                prob.coeffs.p_growth_minus = detail::parse_growth_tag(toks, line_no);
            } else
                throw ParseError("problem file line " + std::to_string(line_no) +
                                     ": p.growth direction must be 'plus' or 'minus'",
                                 line_no);
        } else {
            throw ParseError("problem file line " + std::to_string(line_no) + ": unknown key '" + key + "'",
                             line_no);
        }
    }

    if (!have_domain) throw ParseError("problem file: missing 'domain' line", 0);
    if (!have_p) throw ParseError("problem file: missing 'p' line", 0);
    return prob;
}

inline Problem load_problem(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open problem file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_problem(buf.str());
}

namespace detail {

inline bool is_zero_constant(const PiecewiseFn& f) {
    return f.segment_count() == 1 && f.segment(0).str() == "0";
}

inline void write_piecewise(std::string& out, const char* key, const PiecewiseFn& f) {
    out += key;
    out += " piecewise ";
    for (double b : f.breakpoints()) {
        out += format_real(b);
        out += ' ';
    }
    out += '|';
    for (std::size_t i = 0; i < f.segment_count(); ++i) {
        out += (i == 0 ? " " : " ; ");
        out += f.segment(i).str();
    }
    out += '\n';
}

inline void write_growth(std::string& out, const char* dir, const GrowthTag& tag) {
    if (tag.cls == GrowthClass::Unspecified) return;
    out += "p.growth ";
    out += dir;
    out += ' ';
    switch (tag.cls) {
        case GrowthClass::Power: out += "power " + format_real(tag.value); break;
        case GrowthClass::Exponential: out += "exponential " + format_real(tag.value); break;
        case GrowthClass::Bounded: out += "bounded"; break;
        case GrowthClass::Unspecified: break;
    }
    out += '\n';
}

} // namespace detail

/// Re-emits the problem format losslessly (default sections are omitted).
inline std::string serialize_problem(const Problem& prob) {
    std::string out;
    out += "domain " + detail::format_real(prob.domain_lo) + " " + detail::format_real(prob.domain_hi) + "\n";
    detail::write_piecewise(out, "p", prob.coeffs.p);
    detail::write_growth(out, "plus", prob.coeffs.p_growth_plus);
    detail::write_growth(out, "minus", prob.coeffs.p_growth_minus);
    if (!detail::is_zero_constant(prob.coeffs.Q_ac)) detail::write_piecewise(out, "Q.ac", prob.coeffs.Q_ac);
    if (!prob.coeffs.Q_jump.empty()) {
        out += "Q.jump";
        const auto& jumps = prob.coeffs.Q_jump.jumps();
        for (std::size_t i = 0; i < jumps.size(); ++i) {
            out += (i == 0 ? " " : " ; ");
            out += detail::format_real(jumps[i].first) + " " + detail::format_real(jumps[i].second);
        }
        out += '\n';
    }
    if (!detail::is_zero_constant(prob.coeffs.s)) detail::write_piecewise(out, "s", prob.coeffs.s);
    if (!detail::is_zero_constant(prob.coeffs.r)) detail::write_piecewise(out, "r", prob.coeffs.r);
    return out;
}

inline void save_problem(const Problem& prob, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write problem file '" + path + "'");
    out << serialize_problem(prob);
}

} // namespace slq
