#include "proxreg/trace.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

namespace proxreg {

IterationRecord make_record(const ProblemSpec& p, const std::vector<IterationRecord>& previous,
                            const Vector& x) {
    IterationRecord r;
    r.k = previous.size();
    r.x = x;
    r.f = p.eval(x);
    if (p.optimum_value) r.cost_gap = r.f - *p.optimum_value;
    if (p.has_solution_oracle()) r.dist_S = p.solution(x).distance;
    double diam = previous.empty() ? 0.0 : previous.back().diameter;
    for (const auto& q : previous) diam = std::max(diam, (q.x - x).norm());
    r.diameter = diam;
    return r;
}

void annotate_sublevel_entry(IterationTrace& trace, double nu) {
    trace.nu = nu;
    trace.k0_empirical.reset();
    trace.k0_apriori.reset();
    for (const auto& r : trace.records) {
        if (r.cost_gap && *r.cost_gap <= nu) {
            trace.k0_empirical = r.k;
            break;
        }
    }
    if (!trace.records.empty() && trace.records.front().dist_S) {
        double min_c = std::numeric_limits<double>::infinity();
        for (const auto& r : trace.records) {
            if (r.c) min_c = std::min(min_c, *r.c);
        }
        if (std::isfinite(min_c)) {
            const double d0 = *trace.records.front().dist_S;
            trace.k0_apriori = d0 * d0 / (2.0 * nu * min_c);
        }
    }
}

std::string format_double(double v) {
    std::ostringstream os;
    os << std::scientific << std::setprecision(17) << v;
    return os.str();
}

std::vector<TraceCsvRow> trace_rows(const IterationTrace& trace) {
    std::vector<TraceCsvRow> rows;
    rows.reserve(trace.records.size());
    for (const auto& r : trace.records) {
        rows.push_back(TraceCsvRow{r.k, r.c, r.f, r.cost_gap, r.dist_S, r.residual_norm, r.eps,
                                   r.delta, r.criterion_ok});
    }
    return rows;
}

void write_trace_csv(const IterationTrace& trace, std::ostream& out) {
    auto opt = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string(); };
    out << kTraceCsvHeader << '\n';
    for (const auto& row : trace_rows(trace)) {
        out << row.k << ',' << opt(row.c) << ',' << format_double(row.f) << ','
            << opt(row.cost_gap) << ',' << opt(row.dist_S) << ',' << opt(row.residual_norm)
            << ',' << opt(row.eps) << ',' << opt(row.delta) << ',';
        if (row.criterion_ok) out << (*row.criterion_ok ? '1' : '0');
        out << '\n';
    }
}

void emit_trace_csv(const IterationTrace& trace, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot write trace csv '" + path + "'");
    write_trace_csv(trace, f);
}

namespace {

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    out.push_back(cur);
    return out;
}

std::optional<double> parse_optional(const std::string& s, std::size_t line) {
    if (s.empty()) return std::nullopt;
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
        throw ParseError("malformed number '" + s + "'", line);
    }
    return v;
}

}  // namespace

std::vector<TraceCsvRow> parse_trace_csv(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t line_no = 1;
    if (!std::getline(in, line) || line != kTraceCsvHeader) {
        throw ParseError("missing trace csv header", line_no);
    }
    std::vector<TraceCsvRow> rows;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto fields = split_fields(line);
        if (fields.size() != 9) throw ParseError("expected 9 fields", line_no);
        TraceCsvRow row;
        const auto k = parse_optional(fields[0], line_no);
        if (!k) throw ParseError("missing k", line_no);
        row.k = static_cast<std::size_t>(*k);
        row.c = parse_optional(fields[1], line_no);
        const auto f = parse_optional(fields[2], line_no);
        if (!f) throw ParseError("missing f", line_no);
        row.f = *f;
        row.cost_gap = parse_optional(fields[3], line_no);
        row.dist_S = parse_optional(fields[4], line_no);
        row.residual_norm = parse_optional(fields[5], line_no);
        row.eps = parse_optional(fields[6], line_no);
        row.delta = parse_optional(fields[7], line_no);
        if (fields[8] == "1") {
            row.criterion_ok = true;
        } else if (fields[8] == "0") {
            row.criterion_ok = false;
        } else if (!fields[8].empty()) {
            throw ParseError("criterion_ok must be 0, 1 or empty", line_no);
        }
        rows.push_back(row);
    }
    return rows;
}

}  // namespace proxreg
