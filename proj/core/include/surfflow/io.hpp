#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "surfflow/mesh.hpp"

namespace surfflow {

/// Writes to a sibling temp file and renames it over `path`, so readers see
/// either the old file or the complete new one. Throws Error on IO failure.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

std::string read_file(const std::filesystem::path& path);

struct VtkPointScalar {
    std::string name;
    std::span<const double> values; // one per vertex
};

struct VtkCellVector {
    std::string name;
    std::span<const Vec3> values; // one per triangle
};

/// Legacy ASCII VTK unstructured grid (triangles are cell type 5).
std::string format_vtk(const SurfaceMesh& mesh, std::span<const VtkPointScalar> point_scalars,
                       std::span<const VtkCellVector> cell_vectors, const std::string& title = "surfflow");

void write_vtk(const std::filesystem::path& path, const SurfaceMesh& mesh,
               std::span<const VtkPointScalar> point_scalars, std::span<const VtkCellVector> cell_vectors);

/// Column-oriented CSV table with full double precision (%.17g).
class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> header);

    void add_row(std::span<const double> row);
    [[nodiscard]] std::size_t row_count() const { return rows_.size(); }
    [[nodiscard]] const std::vector<std::string>& header() const { return header_; }
    [[nodiscard]] const std::vector<std::vector<double>>& rows() const { return rows_; }
    [[nodiscard]] std::string str() const;
    void write(const std::filesystem::path& path) const;

private:
    std::vector<std::string> header_;
    std::vector<std::vector<double>> rows_;
};

std::string format_double(double v);

} // namespace surfflow
