#include "surfflow/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "surfflow/errors.hpp"

namespace surfflow {

namespace fs = std::filesystem;

void write_file_atomic(const fs::path& path, const std::string& contents) {
    if (path.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(path.parent_path(), ec);
    }
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw Error("cannot open " + tmp.string() + " for writing");
        }
        out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
        out.flush();
        if (!out) {
            out.close();
            std::error_code ec;
            fs::remove(tmp, ec);
            throw Error("write failed: " + tmp.string());
        }
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw Error("cannot rename " + tmp.string() + " to " + path.string());
    }
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("cannot open " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string format_vtk(const SurfaceMesh& mesh, std::span<const VtkPointScalar> point_scalars,
                       std::span<const VtkCellVector> cell_vectors, const std::string& title) {
    std::ostringstream out;
    out << "# vtk DataFile Version 3.0\n" << title << "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
    out << "POINTS " << mesh.vertex_count() << " double\n";
    for (const auto& p : mesh.vertices()) {
        out << format_double(p.x()) << ' ' << format_double(p.y()) << ' ' << format_double(p.z()) << '\n';
    }
    out << "CELLS " << mesh.triangle_count() << ' ' << 4 * mesh.triangle_count() << '\n';
    for (const auto& t : mesh.triangles()) {
        out << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
    }
    out << "CELL_TYPES " << mesh.triangle_count() << '\n';
    for (int t = 0; t < mesh.triangle_count(); ++t) {
        out << "5\n";
    }
    if (!point_scalars.empty()) {
        out << "POINT_DATA " << mesh.vertex_count() << '\n';
        for (const auto& f : point_scalars) {
            if (static_cast<int>(f.values.size()) != mesh.vertex_count()) {
                throw Error("point field " + f.name + " has wrong length");
            }
            out << "SCALARS " << f.name << " double 1\nLOOKUP_TABLE default\n";
            for (double v : f.values) {
                out << format_double(v) << '\n';
            }
        }
    }
    if (!cell_vectors.empty()) {
        out << "CELL_DATA " << mesh.triangle_count() << '\n';
        for (const auto& f : cell_vectors) {
            if (static_cast<int>(f.values.size()) != mesh.triangle_count()) {
                throw Error("cell field " + f.name + " has wrong length");
            }
            out << "VECTORS " << f.name << " double\n";
            for (const auto& v : f.values) {
                out << format_double(v.x()) << ' ' << format_double(v.y()) << ' ' << format_double(v.z()) << '\n';
            }
        }
    }
    return out.str();
}

void write_vtk(const fs::path& path, const SurfaceMesh& mesh, std::span<const VtkPointScalar> point_scalars,
               std::span<const VtkCellVector> cell_vectors) {
    write_file_atomic(path, format_vtk(mesh, point_scalars, cell_vectors));
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

void CsvTable::add_row(std::span<const double> row) {
    if (row.size() != header_.size()) {
        throw Error("csv row has " + std::to_string(row.size()) + " columns, expected " +
                    std::to_string(header_.size()));
    }
    rows_.emplace_back(row.begin(), row.end());
}

std::string CsvTable::str() const {
    std::ostringstream out;
    for (std::size_t i = 0; i < header_.size(); ++i) {
        out << (i ? "," : "") << header_[i];
    }
    out << '\n';
    for (const auto& r : rows_) {
        for (std::size_t i = 0; i < r.size(); ++i) {
            out << (i ? "," : "") << format_double(r[i]);
        }
        out << '\n';
    }
    return out.str();
}

void CsvTable::write(const fs::path& path) const { write_file_atomic(path, str()); }

} // namespace surfflow
