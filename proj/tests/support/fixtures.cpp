#include "fixtures.hpp"

#include <cmath>

namespace surfflow::testing {

SurfaceMesh reference_triangle() {
    return SurfaceMesh({Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0)}, {{{0, 1, 2}}});
}

SurfaceMesh icosahedron() {
    const double p = (1.0 + std::sqrt(5.0)) / 2.0;
    std::vector<Vec3> v = {{-1, p, 0}, {1, p, 0}, {-1, -p, 0}, {1, -p, 0}, {0, -1, p}, {0, 1, p},
                           {0, -1, -p}, {0, 1, -p}, {p, 0, -1}, {p, 0, 1}, {-p, 0, -1}, {-p, 0, 1}};
    std::vector<std::array<int, 3>> t = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
                                         {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
                                         {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
                                         {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
    return SurfaceMesh(std::move(v), std::move(t));
}

SurfaceMesh unit_square(int n) {
    GeneratorParams p;
    p.nx = n;
    p.ny = n;
    return generate_mesh(MeshKind::rectangle, p);
}

SurfaceMesh small_torus(int n_theta, int n_phi) {
    GeneratorParams p;
    p.n_theta = n_theta;
    p.n_phi = n_phi;
    return generate_mesh(MeshKind::torus, p);
}

SurfaceMesh small_annulus(int n_radial, int n_angular) {
    GeneratorParams p;
    p.n_radial = n_radial;
    p.n_angular = n_angular;
    return generate_mesh(MeshKind::annulus, p);
}

SurfaceMesh small_disk(int n_radial) {
    GeneratorParams p;
    p.n_radial = n_radial;
    return generate_mesh(MeshKind::disk, p);
}

std::string data_path(const std::string& name) { return std::string(SURFFLOW_TEST_DATA) + "/" + name; }

} // namespace surfflow::testing
