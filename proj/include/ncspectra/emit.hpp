#pragma once

// Artifact writers: CSV tables, SVG level diagrams, and the comparison
// report. All output is byte-deterministic: fixed formats, sorted iteration,
// shortest round-trip decimals for data values.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "perturbation.hpp"
#include "sweep.hpp"

namespace ncspectra {

/// Shortest decimal string that parses back to exactly the same double.
inline std::string format_double(double v) {
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    (void)ec;
    return std::string(buf, p);
}

namespace detail {

inline std::string fixed2(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

inline std::string sig(double v, int digits = 12) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

inline std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);  // binary: no newline translation
    if (!out) throw std::runtime_error("cannot write " + path);
    return out;
}

inline std::string join_flags(const std::vector<std::string>& flags) {
    std::string s;
    for (size_t i = 0; i < flags.size(); ++i) {
        if (i) s += ';';
        s += flags[i];
    }
    return s;
}

}  // namespace detail

inline const char* csv_header() {
    return "variant,n,m,branch,theta,E_comm,E_zeroth,dE1,E_total,method,oracle_E,flags";
}

inline std::string csv_line(const SpectrumRow& r) {
    std::string s;
    s += to_string(r.variant);
    s += ',';
    s += std::to_string(r.n);
    s += ',';
    s += std::to_string(r.m);
    s += ',';
    if (r.branch) s += to_string(*r.branch);
    s += ',';
    s += format_double(r.theta);
    s += ',';
    s += format_double(r.E_commutative);
    s += ',';
    s += format_double(r.E_zeroth_nc);
    s += ',';
    s += format_double(r.delta_E_first_order);
    s += ',';
    s += format_double(r.E_total);
    s += ',';
    s += to_string(r.method);
    s += ',';
    if (r.oracle_E) s += format_double(*r.oracle_E);
    s += ',';
    s += detail::join_flags(r.discrepancy_flags);
    return s;
}

inline void emit_csv(const std::vector<SpectrumRow>& rows, const std::string& path) {
    if (rows.empty()) throw std::invalid_argument("emit_csv: no rows");
    auto out = detail::open_out(path);
    out << csv_header() << '\n';
    for (const auto& r : rows) out << csv_line(r) << '\n';
}

/// Parses one emitted CSV line back into the numeric columns (test support;
/// fields never contain commas by construction).
struct ParsedCsvRow {
    std::vector<std::string> fields;
    double num(size_t i) const {
        char* end = nullptr;
        return std::strtod(fields.at(i).c_str(), &end);
    }
};

inline ParsedCsvRow parse_csv_line(const std::string& line) {
    ParsedCsvRow row;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            row.fields.push_back(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    row.fields.push_back(cur);
    return row;
}

// ---------------------------------------------------------------------------
// SVG level diagram: horizontal level ticks at each theta column, connected
// per (n, m, branch) by a dashed fan line. Fixed 800x600 canvas.

inline void emit_svg(const std::vector<SpectrumRow>& rows, const std::string& path) {
    if (rows.empty()) throw std::invalid_argument("emit_svg: no rows");
    const double W = 800, H = 600;
    const double left = 70, right = W - 170, top = 45, bottom = H - 55;

    std::vector<double> thetas;
    double emin = std::numeric_limits<double>::infinity(), emax = -emin;
    for (const auto& r : rows) {
        if (std::find(thetas.begin(), thetas.end(), r.theta) == thetas.end())
            thetas.push_back(r.theta);
        if (std::isfinite(r.E_total)) {
            emin = std::min(emin, r.E_total);
            emax = std::max(emax, r.E_total);
        }
    }
    std::sort(thetas.begin(), thetas.end());
    if (!(emin < emax)) {
        const double mid = std::isfinite(emin) ? emin : 0.0;
        emin = mid - 1.0;
        emax = mid + 1.0;
    }
    const double pad = 0.05 * (emax - emin);
    emin -= pad;
    emax += pad;
    const double tmin = thetas.front(), tmax = thetas.back();

    auto xof = [&](double theta) {
        if (tmax == tmin) return 0.5 * (left + right);
        return left + (theta - tmin) / (tmax - tmin) * (right - left);
    };
    auto yof = [&](double e) { return bottom - (e - emin) / (emax - emin) * (bottom - top); };
    auto color = [](const SpectrumRow& r) {
        if (!r.branch) return "#555555";
        return *r.branch == SpinBranch::Plus ? "#c0392b" : "#2a6fbb";
    };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"600\" "
           "viewBox=\"0 0 800 600\">\n";
    svg << "<rect width=\"800\" height=\"600\" fill=\"#ffffff\"/>\n";
    svg << "<text x=\"70\" y=\"28\" font-family=\"sans-serif\" font-size=\"16\" fill=\"#222222\">"
           "energy levels</text>\n";

    // Axes.
    svg << "<line x1=\"" << detail::fixed2(left) << "\" y1=\"" << detail::fixed2(top) << "\" x2=\""
        << detail::fixed2(left) << "\" y2=\"" << detail::fixed2(bottom)
        << "\" stroke=\"#999999\" stroke-width=\"1\"/>\n";
    svg << "<line x1=\"" << detail::fixed2(left) << "\" y1=\"" << detail::fixed2(bottom) << "\" x2=\""
        << detail::fixed2(right) << "\" y2=\"" << detail::fixed2(bottom)
        << "\" stroke=\"#999999\" stroke-width=\"1\"/>\n";
    svg << "<text x=\"8\" y=\"" << detail::fixed2(yof(emax - pad) + 4)
        << "\" font-family=\"sans-serif\" font-size=\"11\" fill=\"#333333\">" << detail::sig(emax - pad, 6)
        << "</text>\n";
    svg << "<text x=\"8\" y=\"" << detail::fixed2(yof(emin + pad) + 4)
        << "\" font-family=\"sans-serif\" font-size=\"11\" fill=\"#333333\">" << detail::sig(emin + pad, 6)
        << "</text>\n";
    for (double t : thetas)
        svg << "<text x=\"" << detail::fixed2(xof(t) - 12) << "\" y=\"" << detail::fixed2(bottom + 18)
            << "\" font-family=\"sans-serif\" font-size=\"11\" fill=\"#333333\">" << detail::sig(t, 6)
            << "</text>\n";
    svg << "<text x=\"" << detail::fixed2(0.5 * (left + right)) << "\" y=\"" << detail::fixed2(H - 14)
        << "\" font-family=\"sans-serif\" font-size=\"12\" fill=\"#333333\">theta</text>\n";

    // Fan lines per (n, m, branch), then the level ticks on top.
    std::map<std::tuple<int, int, int>, std::vector<const SpectrumRow*>> groups;
    for (const auto& r : rows) {
        const int b = r.branch ? (*r.branch == SpinBranch::Plus ? 2 : 1) : 0;
        groups[{r.n, r.m, b}].push_back(&r);
    }
    for (auto& [key, group] : groups) {
        std::sort(group.begin(), group.end(),
                  [](const SpectrumRow* a, const SpectrumRow* b) { return a->theta < b->theta; });
        if (group.size() > 1) {
            svg << "<polyline fill=\"none\" stroke=\"" << color(*group.front())
                << "\" stroke-width=\"1\" stroke-dasharray=\"3,3\" opacity=\"0.55\" points=\"";
            bool first = true;
            for (const auto* r : group) {
                if (!std::isfinite(r->E_total)) continue;
                if (!first) svg << ' ';
                svg << detail::fixed2(xof(r->theta)) << ',' << detail::fixed2(yof(r->E_total));
                first = false;
            }
            svg << "\"/>\n";
        }
        for (const auto* r : group) {
            if (!std::isfinite(r->E_total)) continue;
            const double x = xof(r->theta), y = yof(r->E_total);
            svg << "<line x1=\"" << detail::fixed2(x - 14) << "\" y1=\"" << detail::fixed2(y)
                << "\" x2=\"" << detail::fixed2(x + 14) << "\" y2=\"" << detail::fixed2(y)
                << "\" stroke=\"" << color(*r) << "\" stroke-width=\"1.5\"/>\n";
        }
        // Label the group at its rightmost point.
        const auto* last = group.back();
        if (std::isfinite(last->E_total)) {
            svg << "<text x=\"" << detail::fixed2(xof(last->theta) + 18) << "\" y=\""
                << detail::fixed2(yof(last->E_total) + 3)
                << "\" font-family=\"sans-serif\" font-size=\"9\" fill=\"#666666\">(" << last->n << ','
                << last->m;
            if (last->branch) svg << ',' << to_string(*last->branch);
            svg << ")</text>\n";
        }
    }

    // Legend.
    const double lx = W - 150, ly = top + 8;
    svg << "<rect x=\"" << detail::fixed2(lx - 10) << "\" y=\"" << detail::fixed2(ly - 14)
        << "\" width=\"140\" height=\"64\" fill=\"#fafafa\" stroke=\"#cccccc\"/>\n";
    struct LegendEntry {
        const char* label;
        const char* color;
    };
    const LegendEntry entries[] = {
        {"canonical", "#555555"}, {"branch -", "#2a6fbb"}, {"branch +", "#c0392b"}};
    double yy = ly;
    for (const auto& e : entries) {
        svg << "<line x1=\"" << detail::fixed2(lx) << "\" y1=\"" << detail::fixed2(yy) << "\" x2=\""
            << detail::fixed2(lx + 26) << "\" y2=\"" << detail::fixed2(yy) << "\" stroke=\"" << e.color
            << "\" stroke-width=\"2\"/>\n";
        svg << "<text x=\"" << detail::fixed2(lx + 32) << "\" y=\"" << detail::fixed2(yy + 4)
            << "\" font-family=\"sans-serif\" font-size=\"11\" fill=\"#333333\">" << e.label
            << "</text>\n";
        yy += 18;
    }

    svg << "</svg>\n";
    auto out = detail::open_out(path);
    out << svg.str();
}

// ---------------------------------------------------------------------------
// Comparison report.

inline void emit_report(const std::vector<SpectrumRow>& rows, const std::string& path) {
    if (rows.empty()) throw std::invalid_argument("emit_report: no rows");
    std::ostringstream out;
    const PotentialParams params = rows.front().params;

    out << "nc-spectra comparison report\n";
    out << "============================\n";
    out << "potential: a=" << format_double(params.a) << " b=" << format_double(params.b)
        << " c=" << format_double(params.c) << "\n";
    out << "variant: " << to_string(rows.front().variant)
        << "   method: " << to_string(rows.front().method) << "\n";
    std::set<double> thetas;
    std::set<std::pair<int, int>> nm;
    for (const auto& r : rows) {
        thetas.insert(r.theta);
        nm.insert({r.n, r.m});
    }
    out << "rows: " << rows.size() << "   theta values:";
    for (double t : thetas) out << ' ' << detail::sig(t, 12);
    out << "\n\n";

    out << "closed-form audit per (n, m), both delta readings\n";
    out << "-------------------------------------------------\n";
    auto audit_value = [](const ClosedFormValue& v) {
        return v.ok ? detail::sig(v.value, 12) : std::string("unavailable (") + v.note + ")";
    };
    for (const auto& [n, m] : nm) {
        for (double delta : {static_cast<double>(m), 0.5 + m}) {
            out << "(n=" << n << ", m=" << m << ") delta=" << detail::sig(delta, 3) << ": ";
            try {
                auto cmp = paper_closed_form_C(params, n, m, delta);
                out << "quadrature=" << audit_value(cmp.quadrature)
                    << "  completed-square=" << audit_value(cmp.completed_square)
                    << "  paper-literal=" << audit_value(cmp.paper_literal)
                    << "  paper-literal-order-fixed=" << audit_value(cmp.paper_literal_order_fixed);
                if (cmp.quadrature.ok && cmp.paper_literal.ok) {
                    const double rel = std::abs(cmp.paper_literal.value - cmp.quadrature.value) /
                                       std::max(std::abs(cmp.quadrature.value), 1e-300);
                    out << "  rel-discrepancy=" << detail::sig(rel, 6);
                }
            } catch (const std::exception& e) {
                out << "rejected (" << e.what() << ")";
            }
            out << "\n";
        }
    }
    out << "\n";

    out << "paper-literal vs quadrature first-order shifts (rel > 1e-6)\n";
    out << "-----------------------------------------------------------\n";
    size_t flagged = 0;
    for (const auto& r : rows) {
        if (!(std::isfinite(r.shift_paper_literal) && std::isfinite(r.shift_quadrature))) continue;
        if (r.shift_paper_literal == 0.0 && r.shift_quadrature == 0.0) continue;
        const double rel = std::abs(r.shift_paper_literal - r.shift_quadrature) /
                           std::max(std::abs(r.shift_quadrature), 1e-300);
        if (rel <= 1e-6) continue;
        ++flagged;
        out << "n=" << r.n << " m=" << r.m << " branch=" << (r.branch ? to_string(*r.branch) : "none")
            << " theta=" << detail::sig(r.theta, 12)
            << ": paper=" << detail::sig(r.shift_paper_literal, 12)
            << " quadrature=" << detail::sig(r.shift_quadrature, 12)
            << " rel=" << detail::sig(rel, 6) << "\n";
    }
    if (!flagged) out << "none\n";
    out << "\n";

    if (rows.front().variant == SpaceVariant::Complex) {
        out << "branch splitting E(+) - E(-) per (theta, n, m)\n";
        out << "----------------------------------------------\n";
        std::map<std::tuple<double, int, int>, std::pair<const SpectrumRow*, const SpectrumRow*>> pairs;
        for (const auto& r : rows) {
            if (!r.branch) continue;
            auto& slot = pairs[{r.theta, r.n, r.m}];
            (*r.branch == SpinBranch::Plus ? slot.second : slot.first) = &r;
        }
        for (const auto& [key, pr] : pairs) {
            if (!pr.first || !pr.second) continue;
            out << "theta=" << detail::sig(std::get<0>(key), 12) << " n=" << std::get<1>(key)
                << " m=" << std::get<2>(key) << ": split="
                << detail::sig(pr.second->E_total - pr.first->E_total, 12) << "\n";
        }
        out << "\n";
    }

    out << "oracle comparison\n";
    out << "-----------------\n";
    bool any_oracle = false;
    std::set<std::pair<int, int>> oracle_seen;
    for (const auto& r : rows) {
        if (!r.oracle_E) continue;
        if (!oracle_seen.insert({r.n, r.m}).second) continue;
        any_oracle = true;
        const double rel = std::abs(r.E_commutative - *r.oracle_E) /
                           std::max(std::abs(*r.oracle_E), 1e-12);
        out << "n=" << r.n << " m=" << r.m << ": E_comm=" << detail::sig(r.E_commutative, 12)
            << " oracle=" << detail::sig(*r.oracle_E, 12) << " rel=" << detail::sig(rel, 6);
        std::string fl = detail::join_flags(r.discrepancy_flags);
        if (!fl.empty()) out << "  [" << fl << "]";
        out << "\n";
    }
    if (!any_oracle) out << "oracle validation not requested\n";

    auto file = detail::open_out(path);
    file << out.str();
}

}  // namespace ncspectra
