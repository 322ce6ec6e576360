#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "mixnorm/model.hpp"

namespace mixnorm::io {

// Headerless CSV. Blank lines are skipped; every row must have the same
// number of fields.
Matrix read_matrix_csv(std::istream& in);
Matrix read_matrix_csv(const std::filesystem::path& path);

// A single-column CSV or a single row is accepted as a vector.
Vector read_vector_csv(std::istream& in);
Vector read_vector_csv(const std::filesystem::path& path);

// One positive group size per line.
GroupPartition read_groups(std::istream& in);
GroupPartition read_groups(const std::filesystem::path& path);

/// digits == 0 writes the shortest representation that round-trips.
std::string format_number(double x, int digits = 0);

void write_matrix_csv(std::ostream& out, const Matrix& m, int digits = 0);
void write_matrix_csv(const std::filesystem::path& path, const Matrix& m, int digits = 0);
void write_vector_csv(std::ostream& out, const Vector& v, int digits = 0);
void write_vector_csv(const std::filesystem::path& path, const Vector& v, int digits = 0);
/// Comma-separated on one line, as used by the prox command.
void write_row_csv(std::ostream& out, const Vector& v, int digits = 0);
void write_groups(std::ostream& out, const GroupPartition& partition);
void write_groups(const std::filesystem::path& path, const GroupPartition& partition);

}  // namespace mixnorm::io
