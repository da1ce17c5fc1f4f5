#pragma once

#include <string>

#include "surfflow/generators.hpp"
#include "surfflow/mesh.hpp"

namespace surfflow::testing {

// Small meshes shared by the test binaries.
SurfaceMesh reference_triangle();
SurfaceMesh icosahedron();
SurfaceMesh unit_square(int n);
SurfaceMesh small_torus(int n_theta = 8, int n_phi = 6);
SurfaceMesh small_annulus(int n_radial = 2, int n_angular = 12);
SurfaceMesh small_disk(int n_radial = 3);

std::string data_path(const std::string& name);

} // namespace surfflow::testing
