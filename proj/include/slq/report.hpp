#pragma once

#include <cstdio>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace slq {

enum class Verdict { Satisfied, Violated, Inconclusive };

inline const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::Satisfied: return "satisfied";
        case Verdict::Violated: return "violated";
        case Verdict::Inconclusive: return "inconclusive";
    }
    return "?";
}

namespace detail {
inline std::string format_sig(double v, int digits = 12) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}
} // namespace detail

/// Structured verdict with numeric evidence. "satisfied"/"violated" are
/// only emitted when the per-criterion decision rule is met; everything
/// else stays inconclusive.
struct ConditionReport {
    std::string criterion;
    Verdict verdict = Verdict::Inconclusive;
    std::vector<std::pair<std::string, double>> evidence;
    std::string notes;

    void add(std::string label, double value) { evidence.emplace_back(std::move(label), value); }

    const double* find(std::string_view label) const {
        for (const auto& [l, v] : evidence)
            if (l == label) return &v;
        return nullptr;
    }

    void write_text(std::ostream& os) const {
        os << "criterion: " << criterion << "\n";
        os << "verdict:   " << to_string(verdict) << "\n";
        for (const auto& [label, value] : evidence)
            os << "  " << label << " = " << detail::format_sig(value) << "\n";
        if (!notes.empty()) os << "notes: " << notes << "\n";
    }

    /// CSV rows `criterion,verdict,evidence_label,value`, one per evidence
    /// item (a single row with an empty label when there is none).
    void write_csv(std::ostream& os) const {
        os << "criterion,verdict,evidence_label,value\n";
        if (evidence.empty()) {
            os << criterion << "," << to_string(verdict) << ",,\n";
            return;
        }
        for (const auto& [label, value] : evidence)
            os << criterion << "," << to_string(verdict) << "," << label << ","
               << detail::format_sig(value) << "\n";
    }
};

} // namespace slq
