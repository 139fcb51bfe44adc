#pragma once

#include <array>
#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "labelcov/errors.hpp"

namespace labelcov {

struct PairRow {
    std::uint8_t y1, y2, x;
};

// Observations of a label pair with a single two-state covariate. The seed
// that generated the data is kept for provenance (0 when unknown).
struct PairDataset {
    std::vector<PairRow> rows;
    std::uint64_t seed = 0;
};

// Cell counts of one covariate state, indexed 2*y1 + y2 (00, 01, 10, 11).
struct StateCounts {
    std::array<std::int64_t, 4> cell{};

    std::int64_t n() const { return cell[0] + cell[1] + cell[2] + cell[3]; }
    double p1() const { return static_cast<double>(cell[2] + cell[3]) / static_cast<double>(n()); }
    double p2() const { return static_cast<double>(cell[1] + cell[3]) / static_cast<double>(n()); }
    double p11() const { return static_cast<double>(cell[3]) / static_cast<double>(n()); }
    double rho() const { return p11() - p1() * p2(); }

    StateCounts& operator+=(const StateCounts& o) {
        for (int i = 0; i < 4; ++i) cell[i] += o.cell[i];
        return *this;
    }
};

inline std::array<StateCounts, 2> count_by_state(const PairDataset& data) {
    std::array<StateCounts, 2> counts{};
    for (const PairRow& r : data.rows) {
        ++counts[r.x].cell[2 * r.y1 + r.y2];
    }
    return counts;
}

inline void write_csv(const PairDataset& data, std::ostream& os) {
    os << "y1,y2,x\n";
    for (const PairRow& r : data.rows) {
        os << int(r.y1) << ',' << int(r.y2) << ',' << int(r.x) << '\n';
    }
}

namespace detail {

inline std::uint8_t parse_bit(const std::string& field, std::size_t line_no) {
    if (field == "0") return 0;
    if (field == "1") return 1;
    throw malformed_csv("line " + std::to_string(line_no) + ": value '" + field +
                        "' is not 0 or 1");
}

}  // namespace detail

// Expects the exact header "y1,y2,x" and 0/1 values throughout.
inline PairDataset read_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) {
        throw malformed_csv("empty input");
    }
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "y1,y2,x") {
        throw malformed_csv("expected header 'y1,y2,x', got '" + line + "'");
    }
    PairDataset data;
    std::size_t line_no = 1;
    while (std::getline(is, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto c1 = line.find(',');
        const auto c2 = line.find(',', c1 == std::string::npos ? c1 : c1 + 1);
        if (c1 == std::string::npos || c2 == std::string::npos ||
            line.find(',', c2 + 1) != std::string::npos) {
            throw malformed_csv("line " + std::to_string(line_no) + ": expected 3 fields");
        }
        data.rows.push_back(PairRow{detail::parse_bit(line.substr(0, c1), line_no),
                                    detail::parse_bit(line.substr(c1 + 1, c2 - c1 - 1), line_no),
                                    detail::parse_bit(line.substr(c2 + 1), line_no)});
    }
    return data;
}

}  // namespace labelcov
