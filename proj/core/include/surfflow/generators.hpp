#pragma once

#include <string>
#include <string_view>

#include "surfflow/mesh.hpp"

namespace surfflow {

enum class MeshKind { rectangle, disk, annulus, torus, cylinder_lateral, cylinder_with_hole, channel_with_hole };

MeshKind parse_mesh_kind(std::string_view name);
std::string to_string(MeshKind kind);

/// Shape parameters for every generator kind; each kind reads only its own
/// subset. Defaults reproduce the benchmark geometries.
struct GeneratorParams {
    // rectangle [0,width] x [0,height], nx x ny cells split into two triangles
    double width = 1.0;
    double height = 1.0;
    int nx = 2;
    int ny = 2;

    // disk (n_radial rings of 6k vertices) and annulus (n_radial x n_angular)
    double inner_radius = 0.5;
    double outer_radius = 1.0;
    int n_radial = 4;
    int n_angular = 24;

    // torus (major radius around the y-axis, minor radius of the tube)
    double major_radius = 2.0;
    double minor_radius = 1.0;
    int n_theta = 8; // around the y-axis
    int n_phi = 8;   // around the tube

    // cylinder_lateral / cylinder_with_hole: axis along z, z in [-L/2, L/2]
    double diameter = 1.0;
    double length = 1.0;
    int n_around = 32;
    int n_axial = 10;
    double hole_diameter = 0.125;
    double hole_z = 0.025;

    // channel_with_hole: [0,channel_length] x [0,channel_height] minus a disk
    double channel_length = 2.2;
    double channel_height = 0.41;
    double hole_center_x = 0.2;
    double hole_center_y = 0.2;
    double hole_radius = 0.05;

    // target edge length for the hole generators
    double h = 0.02;
};

/// Throws ConfigError on invalid parameters.
SurfaceMesh generate_mesh(MeshKind kind, const GeneratorParams& params);

/// Genus and boundary-loop count of what a generator produces.
struct Topology {
    int genus = 0;
    int boundary_loops = 0;
};
Topology expected_topology(MeshKind kind);

} // namespace surfflow
