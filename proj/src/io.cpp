#include "mixnorm/io.hpp"

#include <array>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <string_view>
#include <vector>

namespace mixnorm::io {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

double parse_double(std::string_view field, std::size_t line) {
    field = trim(field);
    if (!field.empty() && field.front() == '+') field.remove_prefix(1);
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (field.empty() || ec != std::errc() || ptr != field.data() + field.size()) {
        throw IoError("line " + std::to_string(line) + ": cannot parse number '" +
                      std::string(field) + "'");
    }
    return value;
}

std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    return out;
}

}  // namespace

Matrix read_matrix_csv(std::istream& in) {
    std::vector<double> values;
    Index cols = -1;
    Index rows = 0;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view view = trim(line);
        if (view.empty()) continue;
        Index count = 0;
        std::size_t start = 0;
        while (true) {
            const auto comma = view.find(',', start);
            const auto field = view.substr(start, comma == std::string_view::npos
                                                      ? std::string_view::npos
                                                      : comma - start);
            values.push_back(parse_double(field, line_no));
            ++count;
            if (comma == std::string_view::npos) break;
            start = comma + 1;
        }
        if (cols < 0) {
            cols = count;
        } else if (count != cols) {
            throw IoError("line " + std::to_string(line_no) + ": expected " +
                          std::to_string(cols) + " fields, found " + std::to_string(count));
        }
        ++rows;
    }
    if (rows == 0) return Matrix(0, 0);
    return Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
        values.data(), rows, cols);
}

Matrix read_matrix_csv(const std::filesystem::path& path) {
    auto in = open_in(path);
    return read_matrix_csv(in);
}

Vector read_vector_csv(std::istream& in) {
    Matrix m = read_matrix_csv(in);
    if (m.cols() == 1) return m.col(0);
    if (m.rows() == 1) return m.row(0).transpose();
    if (m.size() == 0) return Vector(0);
    throw IoError("expected a single row or column, got " + std::to_string(m.rows()) + "x" +
                  std::to_string(m.cols()));
}

Vector read_vector_csv(const std::filesystem::path& path) {
    auto in = open_in(path);
    return read_vector_csv(in);
}

GroupPartition read_groups(std::istream& in) {
    std::vector<Index> sizes;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view view = trim(line);
        if (view.empty()) continue;
        long long size = 0;
        auto [ptr, ec] = std::from_chars(view.data(), view.data() + view.size(), size);
        if (ec != std::errc() || ptr != view.data() + view.size() || size < 1) {
            throw IoError("line " + std::to_string(line_no) + ": invalid group size '" +
                          std::string(view) + "'");
        }
        sizes.push_back(static_cast<Index>(size));
    }
    return GroupPartition(std::move(sizes));
}

GroupPartition read_groups(const std::filesystem::path& path) {
    auto in = open_in(path);
    return read_groups(in);
}

std::string format_number(double x, int digits) {
    std::array<char, 64> buf{};
    if (digits <= 0) {
        auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
        return std::string(buf.data(), ptr);
    }
    const int n = std::snprintf(buf.data(), buf.size(), "%.*g", digits, x);
    return std::string(buf.data(), static_cast<std::size_t>(n));
}

void write_matrix_csv(std::ostream& out, const Matrix& m, int digits) {
    for (Index r = 0; r < m.rows(); ++r) {
        for (Index c = 0; c < m.cols(); ++c) {
            if (c > 0) out << ',';
            out << format_number(m(r, c), digits);
        }
        out << '\n';
    }
}

void write_matrix_csv(const std::filesystem::path& path, const Matrix& m, int digits) {
    auto out = open_out(path);
    write_matrix_csv(out, m, digits);
}

void write_vector_csv(std::ostream& out, const Vector& v, int digits) {
    for (Index i = 0; i < v.size(); ++i) out << format_number(v[i], digits) << '\n';
}

void write_vector_csv(const std::filesystem::path& path, const Vector& v, int digits) {
    auto out = open_out(path);
    write_vector_csv(out, v, digits);
}

void write_row_csv(std::ostream& out, const Vector& v, int digits) {
    for (Index i = 0; i < v.size(); ++i) {
        if (i > 0) out << ',';
        out << format_number(v[i], digits);
    }
    out << '\n';
}

void write_groups(std::ostream& out, const GroupPartition& partition) {
    for (Index s : partition.sizes()) out << s << '\n';
}

void write_groups(const std::filesystem::path& path, const GroupPartition& partition) {
    auto out = open_out(path);
    write_groups(out, partition);
}

}  // namespace mixnorm::io
