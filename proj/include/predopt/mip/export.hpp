#pragma once

#include "predopt/core/errors.hpp"
#include "predopt/mip/check.hpp"
#include "predopt/mip/model.hpp"

#include <charconv>
#include <cmath>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace predopt::mip {

enum class ExportFormat { mps, lp };

inline ExportFormat parse_export_format(std::string const& tag) {
    if (tag == "mps") return ExportFormat::mps;
    if (tag == "lp") return ExportFormat::lp;
    throw std::invalid_argument("unsupported model format '" + tag + "' (expected mps or lp)");
}

namespace detail {

inline std::string num(double v) {
    if (v == kInf) return "1e+30";
    if (v == -kInf) return "-1e+30";
    if (v == 0.0) return "0";
    char buf[64];
    auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

// Keeps names readable by common MPS and LP readers.
inline std::string sanitize(std::string_view name) {
    std::string out;
    for (char c : name) {
        bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' ||
                  c == '.' || c == '(' || c == ')' || c == '[' || c == ']';
        out += ok ? c : '_';
    }
    if (out.empty() || (out[0] >= '0' && out[0] <= '9') || out[0] == '.') out = "n" + out;
    return out;
}

struct ExportNames {
    std::vector<std::string> vars;
    std::vector<std::string> rows;
};

inline ExportNames export_names(MipModel const& m) {
    ExportNames n;
    std::unordered_set<std::string> seen_vars, seen_rows{"obj"};
    for (auto const& v : m.vars) {
        n.vars.push_back(sanitize(v.name));
        if (!seen_vars.insert(n.vars.back()).second)
            throw std::invalid_argument("variable name collision after sanitising: '" + n.vars.back() + "'");
    }
    for (auto const& r : m.rows) {
        n.rows.push_back(sanitize(r.name));
        if (!seen_rows.insert(n.rows.back()).second)
            throw std::invalid_argument("row name collision after sanitising: '" + n.rows.back() + "'");
    }
    return n;
}

inline bool exported_integral(Variable const& v) { return v.kind != VarKind::continuous && !v.relax_in_export; }

inline std::string write_mps(MipModel const& m) {
    auto names = export_names(m);
    std::ostringstream out;
    out << "NAME " << sanitize(m.name) << "\n";
    out << "ROWS\n N obj\n";
    for (std::size_t i = 0; i < m.rows.size(); ++i) {
        char s = m.rows[i].sense == Sense::le ? 'L' : m.rows[i].sense == Sense::ge ? 'G' : 'E';
        out << ' ' << s << ' ' << names.rows[i] << "\n";
    }
    // Column-major view of the rows.
    std::vector<std::vector<std::pair<int, double>>> cols(m.vars.size());
    std::vector<double> obj(m.vars.size(), 0.0);
    for (auto const& tm : m.objective) obj[tm.var] += tm.coef;
    for (std::size_t r = 0; r < m.rows.size(); ++r)
        for (auto const& tm : m.rows[r].terms) cols[tm.var].push_back({int(r), tm.coef});

    out << "COLUMNS\n";
    bool in_marker = false;
    int marker = 0;
    for (std::size_t j = 0; j < m.vars.size(); ++j) {
        bool integral = exported_integral(m.vars[j]);
        if (integral != in_marker) {
            out << "    M" << marker++ << " 'MARKER' " << (integral ? "'INTORG'" : "'INTEND'") << "\n";
            in_marker = integral;
        }
        auto const& name = names.vars[j];
        bool wrote = false;
        if (obj[j] != 0.0) {
            out << "    " << name << " obj " << num(obj[j]) << "\n";
            wrote = true;
        }
        for (auto [r, c] : cols[j]) {
            out << "    " << name << ' ' << names.rows[r] << ' ' << num(c) << "\n";
            wrote = true;
        }
        if (!wrote) out << "    " << name << " obj 0\n";
    }
    if (in_marker) out << "    M" << marker++ << " 'MARKER' 'INTEND'\n";

    out << "RHS\n";
    if (m.objective_constant != 0.0) out << "    rhs obj " << num(-m.objective_constant) << "\n";
    for (std::size_t r = 0; r < m.rows.size(); ++r)
        if (m.rows[r].rhs != 0.0) out << "    rhs " << names.rows[r] << ' ' << num(m.rows[r].rhs) << "\n";

    out << "BOUNDS\n";
    for (std::size_t j = 0; j < m.vars.size(); ++j) {
        auto const& v = m.vars[j];
        auto const& name = names.vars[j];
        if (v.kind == VarKind::binary && !v.relax_in_export && v.lb == 0.0 && v.ub == 1.0) {
            out << " BV bnd " << name << "\n";
            continue;
        }
        if (v.lb == -kInf && v.ub == kInf) {
            out << " FR bnd " << name << "\n";
            continue;
        }
        if (v.lb == v.ub) {
            out << " FX bnd " << name << ' ' << num(v.lb) << "\n";
            continue;
        }
        if (v.lb == -kInf) out << " MI bnd " << name << "\n";
        else if (v.lb != 0.0 || exported_integral(v)) out << " LO bnd " << name << ' ' << num(v.lb) << "\n";
        if (v.ub != kInf) out << " UP bnd " << name << ' ' << num(v.ub) << "\n";
        else if (exported_integral(v)) out << " PL bnd " << name << "\n";
    }
    out << "ENDATA\n";
    return out.str();
}

inline void lp_terms(std::ostringstream& out, std::vector<Term> const& terms, ExportNames const& names) {
    int on_line = 0;
    for (auto const& tm : terms) {
        if (on_line == 8) {
            out << "\n   ";
            on_line = 0;
        }
        out << (tm.coef < 0 ? " - " : " + ") << num(std::abs(tm.coef)) << ' ' << names.vars[tm.var];
        ++on_line;
    }
}

inline std::string write_lp(MipModel const& m) {
    auto names = export_names(m);
    std::ostringstream out;
    out << "\\ Problem: " << sanitize(m.name) << "\n";
    out << "Minimize\n obj:";
    if (m.objective.empty() && !m.vars.empty()) out << " 0 " << names.vars[0];
    lp_terms(out, m.objective, names);
    if (m.objective_constant != 0.0)
        out << (m.objective_constant < 0 ? " - " : " + ") << num(std::abs(m.objective_constant));
    out << "\nSubject To\n";
    for (std::size_t r = 0; r < m.rows.size(); ++r) {
        auto const& row = m.rows[r];
        out << ' ' << names.rows[r] << ':';
        lp_terms(out, row.terms, names);
        out << (row.sense == Sense::le ? " <= " : row.sense == Sense::ge ? " >= " : " = ") << num(row.rhs) << "\n";
    }
    out << "Bounds\n";
    auto bound = [](double v) { return v == kInf ? std::string("+inf") : v == -kInf ? std::string("-inf") : num(v); };
    std::vector<int> binaries, generals;
    for (std::size_t j = 0; j < m.vars.size(); ++j) {
        auto const& v = m.vars[j];
        auto const& name = names.vars[j];
        if (v.kind == VarKind::binary && !v.relax_in_export && v.lb == 0.0 && v.ub == 1.0) {
            binaries.push_back(int(j));
            continue;
        }
        if (exported_integral(v)) generals.push_back(int(j));
        if (v.lb == -kInf && v.ub == kInf) out << ' ' << name << " free\n";
        else if (v.lb == v.ub) out << ' ' << name << " = " << num(v.lb) << "\n";
        else if (v.lb != 0.0 || v.ub != kInf) out << ' ' << bound(v.lb) << " <= " << name << " <= " << bound(v.ub) << "\n";
    }
    auto section = [&](char const* title, std::vector<int> const& ids) {
        if (ids.empty()) return;
        out << title << "\n";
        for (int j : ids) out << ' ' << names.vars[j] << "\n";
    };
    section("Binaries", binaries);
    section("Generals", generals);
    out << "End\n";
    return out.str();
}

inline std::vector<std::string_view> tokens(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
        std::size_t j = i;
        while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
        if (j > i) out.push_back(line.substr(i, j - i));
        i = j;
    }
    return out;
}

inline double parse_number(std::string_view tok, int line) {
    double v = 0.0;
    auto r = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (r.ec != std::errc{} || r.ptr != tok.data() + tok.size())
        throw ParseError("expected a number, got '" + std::string(tok) + "'", line, 1);
    if (v >= 1e30) return kInf;
    if (v <= -1e30) return -kInf;
    return v;
}

}  // namespace detail

/// MPS (free format) or CPLEX-LP text. Peak-level variables are written as
/// continuous in [0, 1].
inline std::string export_model(MipModel const& m, ExportFormat fmt) {
    return fmt == ExportFormat::mps ? detail::write_mps(m) : detail::write_lp(m);
}

/// Reads free-format MPS as written by export_model (and the common subset of
/// other writers). Entity maps are not restored.
inline MipModel parse_mps(std::string_view text) {
    MipModel m;
    enum class Sec { none, rows, columns, rhs, ranges, bounds, done } sec = Sec::none;
    std::string obj_row;
    std::unordered_map<std::string, int> row_index;
    bool integral = false;
    int line_no = 0;
    std::size_t pos = 0;
    auto var_of = [&](std::string_view name, int line) {
        int j = m.find(std::string(name));
        if (j < 0) throw ParseError("unknown column '" + std::string(name) + "'", line, 1);
        return j;
    };
    while (pos < text.size() && sec != Sec::done) {
        std::size_t nl = text.find('\n', pos);
        if (nl == std::string_view::npos) nl = text.size();
        std::string_view line = text.substr(pos, nl - pos);
        pos = nl + 1;
        ++line_no;
        auto tok = detail::tokens(line);
        if (tok.empty() || tok[0][0] == '*') continue;
        bool header = line[0] != ' ' && line[0] != '\t';
        if (header) {
            if (tok[0] == "NAME") m.name = tok.size() > 1 ? std::string(tok[1]) : "";
            else if (tok[0] == "ROWS") sec = Sec::rows;
            else if (tok[0] == "COLUMNS") sec = Sec::columns;
            else if (tok[0] == "RHS") sec = Sec::rhs;
            else if (tok[0] == "RANGES") sec = Sec::ranges;
            else if (tok[0] == "BOUNDS") sec = Sec::bounds;
            else if (tok[0] == "ENDATA") sec = Sec::done;
            else throw ParseError("unknown MPS section '" + std::string(tok[0]) + "'", line_no, 1);
            continue;
        }
        switch (sec) {
            case Sec::rows: {
                if (tok.size() != 2) throw ParseError("expected '<sense> <row>'", line_no, 1);
                if (tok[0] == "N") {
                    if (obj_row.empty()) obj_row = std::string(tok[1]);
                    continue;
                }
                Sense s = tok[0] == "L" ? Sense::le : tok[0] == "G" ? Sense::ge : Sense::eq;
                if (tok[0] != "L" && tok[0] != "G" && tok[0] != "E")
                    throw ParseError("unknown row sense '" + std::string(tok[0]) + "'", line_no, 1);
                row_index[std::string(tok[1])] = int(m.rows.size());
                m.add_row(std::string(tok[1]), {}, s, 0.0);
                break;
            }
            case Sec::columns: {
                if (tok.size() >= 3 && tok[1] == "'MARKER'") {
                    integral = tok[2] == "'INTORG'";
                    continue;
                }
                if (tok.size() != 3 && tok.size() != 5) throw ParseError("expected '<col> <row> <value>'", line_no, 1);
                int j = m.find(std::string(tok[0]));
                if (j < 0) {
                    j = m.add_var(std::string(tok[0]), integral ? VarKind::integer : VarKind::continuous, 0.0, kInf);
                }
                for (std::size_t k = 1; k + 1 < tok.size(); k += 2) {
                    double c = detail::parse_number(tok[k + 1], line_no);
                    if (c == 0.0) continue;
                    if (tok[k] == obj_row) {
                        m.objective.push_back({j, c});
                        continue;
                    }
                    auto it = row_index.find(std::string(tok[k]));
                    if (it == row_index.end()) throw ParseError("unknown row '" + std::string(tok[k]) + "'", line_no, 1);
                    m.rows[it->second].terms.push_back({j, c});
                }
                break;
            }
            case Sec::rhs: {
                if (tok.size() != 3 && tok.size() != 5) throw ParseError("expected '<set> <row> <value>'", line_no, 1);
                for (std::size_t k = 1; k + 1 < tok.size(); k += 2) {
                    double v = detail::parse_number(tok[k + 1], line_no);
                    if (tok[k] == obj_row) {
                        m.objective_constant = -v;
                        continue;
                    }
                    auto it = row_index.find(std::string(tok[k]));
                    if (it == row_index.end()) throw ParseError("unknown row '" + std::string(tok[k]) + "'", line_no, 1);
                    m.rows[it->second].rhs = v;
                }
                break;
            }
            case Sec::ranges: throw ParseError("RANGES are not supported", line_no, 1);
            case Sec::bounds: {
                if (tok.size() < 3) throw ParseError("expected '<type> <set> <col> [value]'", line_no, 1);
                int j = var_of(tok[2], line_no);
                auto& v = m.vars[j];
                auto value = [&] {
                    if (tok.size() < 4) throw ParseError("bound needs a value", line_no, 1);
                    return detail::parse_number(tok[3], line_no);
                };
                if (tok[0] == "UP") v.ub = value();
                else if (tok[0] == "LO") v.lb = value();
                else if (tok[0] == "FX") v.lb = v.ub = value();
                else if (tok[0] == "FR") { v.lb = -kInf; v.ub = kInf; }
                else if (tok[0] == "MI") v.lb = -kInf;
                else if (tok[0] == "PL") v.ub = kInf;
                else if (tok[0] == "BV") { v.kind = VarKind::binary; v.lb = 0; v.ub = 1; }
                else if (tok[0] == "LI") { v.kind = VarKind::integer; v.lb = value(); }
                else if (tok[0] == "UI") { v.kind = VarKind::integer; v.ub = value(); }
                else throw ParseError("unknown bound type '" + std::string(tok[0]) + "'", line_no, 1);
                break;
            }
            default: throw ParseError("data line outside a section", line_no, 1);
        }
    }
    if (sec != Sec::done) throw ParseError("missing ENDATA", line_no, 1);
    for (auto& v : m.vars)
        if (v.kind == VarKind::integer && v.lb == 0.0 && v.ub == 1.0) v.kind = VarKind::binary;
    return m;
}

/// Variables as they appear in an export: relaxed peak levels become plain
/// continuous variables.
inline MipModel export_view(MipModel m) {
    for (auto& v : m.vars)
        if (v.relax_in_export) {
            v.kind = VarKind::continuous;
            v.relax_in_export = false;
        }
    return m;
}

/// `name value` per line; blank lines and lines starting with '#' are skipped.
/// Variables not mentioned stay missing.
inline Assignment import_solution(MipModel const& m, std::string_view text) {
    Assignment a = Assignment::missing(m);
    std::unordered_map<std::string, int> by_export_name;
    auto names = detail::export_names(m);
    for (int j = 0; j < int(names.vars.size()); ++j) by_export_name.emplace(names.vars[j], j);
    int line_no = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t nl = text.find('\n', pos);
        if (nl == std::string_view::npos) nl = text.size();
        std::string_view line = text.substr(pos, nl - pos);
        pos = nl + 1;
        ++line_no;
        auto tok = detail::tokens(line);
        if (tok.empty() || tok[0][0] == '#') continue;
        if (tok.size() != 2) throw ParseError("expected 'name value'", line_no, 1);
        auto it = by_export_name.find(std::string(tok[0]));
        if (it == by_export_name.end()) throw ParseError("unknown variable '" + std::string(tok[0]) + "'", line_no, 1);
        if (!std::isnan(a.values[it->second]))
            throw ParseError("variable '" + std::string(tok[0]) + "' listed twice", line_no, 1);
        a.values[it->second] = detail::parse_number(tok[1], line_no);
    }
    return a;
}

inline std::string write_solution(MipModel const& m, Assignment const& a) {
    auto names = detail::export_names(m);
    std::ostringstream out;
    for (std::size_t j = 0; j < m.vars.size(); ++j)
        if (!std::isnan(a.values[j])) out << names.vars[j] << ' ' << detail::num(a.values[j]) << "\n";
    return out.str();
}

}  // namespace predopt::mip
