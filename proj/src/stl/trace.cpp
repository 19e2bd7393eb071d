#include "fairfly/stl.hpp"

#include <algorithm>
#include <iomanip>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

namespace fairfly::stl {

Trace::Trace(double dt, int dim, std::vector<std::vector<double>> positions)
    : dt_(dt), dim_(dim), positions_(std::move(positions)) {
    if (!(dt > 0.0)) {
        throw std::invalid_argument("trace time step must be positive");
    }
    if (dim <= 0) {
        throw std::invalid_argument("trace dimension must be positive");
    }
    for (std::size_t n = 0; n < positions_.size(); ++n) {
        const auto& s = positions_[n];
        if (s.empty() || s.size() % static_cast<std::size_t>(dim) != 0) {
            throw std::invalid_argument("trace for UAV " + std::to_string(n + 1) +
                                        " must hold a non-empty whole number of samples");
        }
    }
}

int Trace::length(int uav) const {
    return static_cast<int>(positions_.at(uav).size() / static_cast<std::size_t>(dim_)) - 1;
}

int Trace::max_length() const {
    int m = 0;
    for (int n = 0; n < uav_count(); ++n) {
        m = std::max(m, length(n));
    }
    return m;
}

std::span<const double> Trace::at(int uav, int k) const {
    const auto& s = positions_.at(uav);
    const int last = length(uav);
    const std::size_t idx = static_cast<std::size_t>(std::min(k, last)) * dim_;
    return {s.data() + idx, static_cast<std::size_t>(dim_)};
}

Trace read_trace_csv(std::istream& in, double dt) {
    std::string line;
    std::map<int, std::map<int, std::vector<double>>> rows;
    int dim = -1;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') {
            continue;
        }
        if (line.rfind("uav", 0) == 0) {
            continue; // header
        }
        std::stringstream ss(line);
        std::string cell;
        std::vector<double> fields;
        while (std::getline(ss, cell, ',')) {
            try {
                fields.push_back(std::stod(cell));
            } catch (const std::exception&) {
                throw std::runtime_error("trace CSV line " + std::to_string(line_no) + ": bad number '" + cell + "'");
            }
        }
        if (fields.size() < 3) {
            throw std::runtime_error("trace CSV line " + std::to_string(line_no) + ": expected uav,k,x1..xd");
        }
        const int row_dim = static_cast<int>(fields.size()) - 2;
        if (dim >= 0 && row_dim != dim) {
            throw std::runtime_error("trace CSV line " + std::to_string(line_no) + ": inconsistent dimension");
        }
        dim = row_dim;
        const int uav = static_cast<int>(fields[0]);
        const int k = static_cast<int>(fields[1]);
        if (uav < 1 || k < 0) {
            throw std::runtime_error("trace CSV line " + std::to_string(line_no) + ": uav must be >= 1 and k >= 0");
        }
        rows[uav][k] = std::vector<double>(fields.begin() + 2, fields.end());
    }
    if (rows.empty()) {
        throw std::runtime_error("trace CSV holds no samples");
    }
    const int uav_count = rows.rbegin()->first;
    std::vector<std::vector<double>> positions(uav_count);
    for (int n = 1; n <= uav_count; ++n) {
        auto it = rows.find(n);
        if (it == rows.end()) {
            throw std::runtime_error("trace CSV has no samples for UAV " + std::to_string(n));
        }
        int expect = 0;
        for (const auto& [k, x] : it->second) {
            if (k != expect++) {
                throw std::runtime_error("trace CSV: UAV " + std::to_string(n) + " samples are not contiguous from k = 0");
            }
            positions[n - 1].insert(positions[n - 1].end(), x.begin(), x.end());
        }
    }
    return Trace(dt, dim, std::move(positions));
}

void write_trace_csv(std::ostream& out, const Trace& trace) {
    out << "uav,k";
    for (int a = 1; a <= trace.dim(); ++a) {
        out << ",x" << a;
    }
    out << '\n';
    out << std::setprecision(17);
    for (int n = 0; n < trace.uav_count(); ++n) {
        for (int k = 0; k <= trace.length(n); ++k) {
            out << n + 1 << ',' << k;
            for (double v : trace.at(n, k)) {
                out << ',' << v;
            }
            out << '\n';
        }
    }
}

} // namespace fairfly::stl
