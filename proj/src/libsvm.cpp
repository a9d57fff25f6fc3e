#include <charconv>
#include <fstream>
#include <sstream>
#include <utility>
#include <vector>

#include "proxreg/zoo.hpp"

namespace proxreg {

namespace {

struct SparseRow {
    double label;
    std::vector<std::pair<std::size_t, double>> entries;
};

double parse_double(std::string_view tok, std::size_t line) {
    // std::from_chars rejects a leading '+', which LIBSVM labels often carry.
    if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
    double v = 0.0;
    const auto* end = tok.data() + tok.size();
    auto [ptr, ec] = std::from_chars(tok.data(), end, v);
    if (ec != std::errc() || ptr != end) {
        throw ParseError("malformed number '" + std::string(tok) + "'", line);
    }
    return v;
}

double coerce_label(double raw, std::size_t line) {
    // {0,1} files are common besides {-1,+1}
    if (raw == 1.0) return 1.0;
    if (raw == -1.0 || raw == 0.0) return -1.0;
    throw ParseError("label " + std::to_string(raw) + " is not one of -1, 0, 1", line);
}

}  // namespace

Dataset parse_libsvm(std::string_view text, std::optional<std::size_t> dimension,
                     std::string source) {
    std::vector<SparseRow> rows;
    std::size_t max_index = 0;
    std::size_t line_no = 0;

    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        std::istringstream ls(line);
        std::string tok;
        if (!(ls >> tok)) continue;  // blank line

        SparseRow row;
        row.label = coerce_label(parse_double(tok, line_no), line_no);
        std::size_t prev = 0;
        while (ls >> tok) {
            const auto colon = tok.find(':');
            if (colon == std::string::npos || colon == 0 || colon + 1 == tok.size()) {
                throw ParseError("expected idx:val, got '" + tok + "'", line_no);
            }
            std::size_t idx = 0;
            const std::string_view idx_tok(tok.data(), colon);
            auto [ptr, ec] = std::from_chars(idx_tok.data(), idx_tok.data() + idx_tok.size(), idx);
            if (ec != std::errc() || ptr != idx_tok.data() + idx_tok.size() || idx == 0) {
                throw ParseError("bad feature index '" + std::string(idx_tok) + "'", line_no);
            }
            if (idx <= prev) throw ParseError("feature indices must increase", line_no);
            prev = idx;
            const double val =
                parse_double(std::string_view(tok).substr(colon + 1), line_no);
            row.entries.emplace_back(idx, val);
            max_index = std::max(max_index, idx);
        }
        rows.push_back(std::move(row));
    }

    const std::size_t d = dimension.value_or(max_index);
    if (dimension && max_index > *dimension) {
        throw ParseError("feature index exceeds declared dimension", line_no);
    }

    Dataset ds;
    ds.features = Matrix::Zero(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(d));
    ds.labels.resize(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto r = static_cast<Eigen::Index>(i);
        ds.labels[r] = rows[i].label;
        for (const auto& [idx, val] : rows[i].entries) {
            ds.features(r, static_cast<Eigen::Index>(idx - 1)) = val;
        }
    }
    ds.source = std::move(source);
    return ds;
}

Dataset load_libsvm(const std::string& path, std::optional<std::size_t> dimension) {
    std::ifstream f(path);
    if (!f) throw ParseError("cannot open '" + path + "'", 0);
    std::stringstream buf;
    buf << f.rdbuf();
    return parse_libsvm(buf.str(), dimension, "file(" + path + ")");
}

}  // namespace proxreg
