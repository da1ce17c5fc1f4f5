#include <doctest.h>

#include <filesystem>
#include <sstream>

#include "fixtures.hpp"
#include "surfflow/errors.hpp"
#include "surfflow/io.hpp"
#include "surfflow/stepper.hpp"

using namespace surfflow;
using namespace surfflow::testing;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    auto dir = fs::temp_directory_path() / ("surfflow_io_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

// section body following a line that starts with `key`
std::istringstream section(const std::string& text, const std::string& key) {
    const auto pos = text.find(key);
    REQUIRE(pos != std::string::npos);
    const auto eol = text.find('\n', pos);
    return std::istringstream(text.substr(eol + 1));
}

} // namespace

TEST_CASE("single triangle file") {
    const auto m = reference_triangle();
    const auto text = format_vtk(m, {}, {});
    CHECK(text.find("POINTS 3 double") != std::string::npos);
    CHECK(text.find("CELLS 1 4\n3 0 1 2\n") != std::string::npos);
    CHECK(text.find("CELL_TYPES 1\n5\n") != std::string::npos);
}

TEST_CASE("points round-trip at full precision") {
    const auto m = small_torus(7, 5);
    const auto text = format_vtk(m, {}, {});
    auto in = section(text, "POINTS");
    for (const auto& p : m.vertices()) {
        double x, y, z;
        in >> x >> y >> z;
        CHECK(x == p.x());
        CHECK(y == p.y());
        CHECK(z == p.z());
    }
}

TEST_CASE("harmonic state exports its basis field") {
    const auto m = small_torus(12, 8);
    const auto setup = homogeneous_setup(m);
    const auto basis = harmonic_basis(m, 5);
    REQUIRE(basis.size() == 2);
    const FlowSolver solver(m, setup, basis, SimConfig{});
    FlowState s;
    s.psi = FieldP1(m.vertex_count(), 0.0);
    s.omega = FieldP1(m.vertex_count(), 0.0);
    s.h = {1.0, 0.0};
    const auto V = solver.velocity(s);
    const VtkPointScalar ps[] = {{"psi", s.psi.values()}, {"omega", s.omega.values()}};
    const VtkCellVector cv[] = {{"velocity", V.values()}};
    const auto text = format_vtk(m, ps, cv);
    CHECK(text.find("SCALARS psi double 1") != std::string::npos);
    CHECK(text.find("SCALARS omega double 1") != std::string::npos);
    auto in = section(text, "VECTORS velocity");
    for (const auto& H : basis.fields[0]) {
        double x, y, z;
        in >> x >> y >> z;
        CHECK(x == H.x());
        CHECK(y == H.y());
        CHECK(z == H.z());
    }
}

TEST_CASE("field length mismatch") {
    const auto m = reference_triangle();
    const std::vector<double> two(2, 0.0);
    const VtkPointScalar ps[] = {{"bad", two}};
    CHECK_THROWS_AS(format_vtk(m, ps, {}), Error);
}

TEST_CASE("atomic writes") {
    const auto dir = scratch("atomic");
    const auto path = dir / "a.txt";
    write_file_atomic(path, "first");
    write_file_atomic(path, "second");
    CHECK(read_file(path) == "second");
    CHECK(!fs::exists(dir / "a.txt.tmp"));
    // parent is a regular file: nothing may be left behind
    const auto bad = path / "child.txt";
    CHECK_THROWS_AS(write_file_atomic(bad, "x"), Error);
    CHECK(!fs::exists(bad));
    CHECK(read_file(path) == "second");
    CHECK_THROWS_AS(read_file(dir / "missing"), Error);
    fs::remove_all(dir);
}

TEST_CASE("csv table") {
    CsvTable t({"t", "x"});
    const double r1[] = {0.1, 1.0 / 3.0};
    t.add_row(r1);
    CHECK(t.str() == "t,x\n0.10000000000000001,0.33333333333333331\n");
    const double r2[] = {1.0};
    CHECK_THROWS_AS(t.add_row(r2), Error);
    CHECK(std::stod(format_double(1.0 / 7.0)) == 1.0 / 7.0);
    const auto dir = scratch("csv");
    t.write(dir / "t.csv");
    CHECK(read_file(dir / "t.csv") == t.str());
    fs::remove_all(dir);
}
