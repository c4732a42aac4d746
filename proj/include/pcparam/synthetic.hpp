#pragma once

#include "pcparam/types.hpp"

#include <cstdint>

namespace pcparam {

// Synthetic surfaces and fixtures used by the desk-scale experiments and tests.

/// n points uniform inside a three-lobed planar blob of radius about 0.35
/// centred at (0.5, 0.5).
Points blob_2d(Eigen::Index n, std::uint64_t seed);

/// Height field z = height * exp(-(x^2 + y^2) / width^2) over points uniform in the unit disk.
Points spike_surface(Eigen::Index n, std::uint64_t seed, double height = 1.0, double width = 0.25);

/// Open disk-type surface with a nose bump and two eye dimples, meshed from
/// a jittered triangular lattice of the unit disk at the given spacing
/// (about 1000 vertices at spacing 0.06).
TriangleMesh face_like_surface(double spacing, std::uint64_t seed);

/// Cap of the unit sphere above z = z_min, n points uniform in its planar projection.
Points hemisphere(Eigen::Index n, std::uint64_t seed, double z_min = 0.2);

/// Jittered triangular lattice of spacing h covering the annulus
/// inner_radius <= |p| <= outer_radius, plus equally spaced points on both circles.
Points annulus_cloud(double h, double inner_radius, double outer_radius, std::uint64_t seed);

}  // namespace pcparam
