#pragma once

#include <filesystem>
#include <iosfwd>

#include <Eigen/Dense>

namespace toprank {

/// Text matrix format: a `R C` header line, then R lines of C space-separated
/// decimals. Values are written in shortest round-trip form.
void write_matrix(std::ostream& out, const Eigen::MatrixXd& m);
void write_matrix(const std::filesystem::path& path, const Eigen::MatrixXd& m);

Eigen::MatrixXd read_matrix(std::istream& in);
Eigen::MatrixXd read_matrix(const std::filesystem::path& path);

}  // namespace toprank
