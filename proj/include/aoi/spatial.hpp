#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "aoi/errors.hpp"

namespace aoi {

struct Point {
    double x = 0.0;
    double y = 0.0;
};

inline double squared_distance(const Point& a, const Point& b) {
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    return dx * dx + dy * dy;
}

// Finite rectangular observation window for sampling.
struct Window {
    double x_min = 0.0;
    double x_max = 0.0;
    double y_min = 0.0;
    double y_max = 0.0;

    double area() const { return (x_max - x_min) * (y_max - y_min); }
    void validate() const;

    static Window square(double side) { return Window{0.0, side, 0.0, side}; }
};

// Composite ground-node distribution: an independent uniform component of
// density m1*lambda1 plus a cluster component whose parents have density
// m2*lambda_p2 and whose offspring fill a disc of radius r_c at density
// lambda_c2. lambda_a is the UAV density.
struct SpatialConfig {
    double m1 = 0.5;
    double lambda1 = 0.01;
    double m2 = 0.5;
    double lambda_p2 = 0.002;
    double lambda_c2 = 0.015;
    double r_c = 5.0;
    double lambda_a = 5e-4;

    void validate() const;
};

// A realized planar pattern. parent[i] is -1 for independently placed points
// and an index into cluster_parents for cluster-born points.
struct PointPattern {
    std::vector<Point> points;
    std::vector<std::int64_t> parent;
    std::vector<Point> cluster_parents;

    std::size_t size() const { return points.size(); }
    bool is_cluster_born(std::size_t i) const { return parent[i] >= 0; }
};

// Ground-node -> nearest-UAV assignment plus per-UAV load counts.
struct AssociationMap {
    std::vector<std::size_t> assignment;  // ground index -> UAV index
    std::vector<std::size_t> load;        // UAV index -> node count
};

// Mean density of the composite pattern: m1*lambda1 + m2*pi*r_c^2*lambda_p2*lambda_c2.
double composite_density(const SpatialConfig& cfg);

// Homogeneous Poisson pattern of the given intensity on the window.
PointPattern sample_ppp(double lambda, const Window& window, std::uint64_t seed);

// Superposition of the uniform component and the cluster component. Parents
// are sampled inside the window; children may land slightly outside and are
// kept (no edge correction).
PointPattern sample_ground_pattern(const SpatialConfig& cfg, const Window& window,
                                   std::uint64_t seed);

// Assigns every ground node to its Euclidean-nearest UAV; exact ties go to the
// lowest UAV index. Throws EmptyUavSet when uavs has no points.
AssociationMap associate_nearest(const PointPattern& ground, const PointPattern& uavs);

// Random-scheduling probability 1/N_j of the given UAV's cell. Throws
// NoAssociatedNodes when the cell is empty.
double scheduling_probability(const AssociationMap& assoc, std::size_t uav);

// Debug export: one "x,y,origin" row per point.
void write_pattern_csv(const PointPattern& pattern, const std::string& path);

}  // namespace aoi
