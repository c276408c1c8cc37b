#include "aoi/spatial.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>

#include "aoi/random.hpp"

namespace aoi {

namespace {

constexpr std::uint64_t kPppStream = 0x5050;
constexpr std::uint64_t kParentStream = 0x5051;
constexpr std::uint64_t kChildStream = 0x5052;

void require(bool ok, const char* field, const char* constraint) {
    if (!ok) throw ValidationError(field, constraint);
}

}  // namespace

void Window::validate() const {
    require(x_max > x_min, "window.x", "x_max must exceed x_min");
    require(y_max > y_min, "window.y", "y_max must exceed y_min");
    require(area() > 0.0, "window.area", "must be positive");
}

void SpatialConfig::validate() const {
    require(m1 >= 0.0 && m1 <= 1.0, "spatial.m1", "must be in [0,1]");
    require(m2 >= 0.0 && m2 <= 1.0, "spatial.m2", "must be in [0,1]");
    require(std::abs(m1 + m2 - 1.0) <= 1e-12, "spatial.m1+m2", "must sum to 1");
    require(lambda1 >= 0.0, "spatial.lambda1", "must be >= 0");
    require(lambda_p2 >= 0.0, "spatial.lambda_p2", "must be >= 0");
    require(lambda_c2 >= 0.0, "spatial.lambda_c2", "must be >= 0");
    require(lambda_a >= 0.0, "spatial.lambda_a", "must be >= 0");
    require(r_c > 0.0, "spatial.r_c", "must be > 0");
}

double composite_density(const SpatialConfig& cfg) {
    cfg.validate();
    return cfg.m1 * cfg.lambda1 +
           cfg.m2 * std::numbers::pi * cfg.r_c * cfg.r_c * cfg.lambda_p2 * cfg.lambda_c2;
}

namespace {

void append_uniform_points(PointPattern& out, double lambda, const Window& w,
                           RandomStream& rng, std::int64_t parent_tag) {
    const std::uint64_t n = rng.poisson(lambda * w.area());
    for (std::uint64_t i = 0; i < n; ++i) {
        out.points.push_back({rng.uniform(w.x_min, w.x_max), rng.uniform(w.y_min, w.y_max)});
        out.parent.push_back(parent_tag);
    }
}

}  // namespace

PointPattern sample_ppp(double lambda, const Window& window, std::uint64_t seed) {
    window.validate();
    require(lambda >= 0.0, "lambda", "must be >= 0");
    PointPattern out;
    RandomStream rng(derive_seed(seed, {kPppStream}));
    append_uniform_points(out, lambda, window, rng, -1);
    return out;
}

PointPattern sample_ground_pattern(const SpatialConfig& cfg, const Window& window,
                                   std::uint64_t seed) {
    cfg.validate();
    window.validate();
    PointPattern out;

    // Independent streams per purpose: the uniform component is unaffected by
    // how many cluster draws happen and vice versa.
    RandomStream ppp_rng(derive_seed(seed, {kPppStream}));
    append_uniform_points(out, cfg.m1 * cfg.lambda1, window, ppp_rng, -1);

    RandomStream parent_rng(derive_seed(seed, {kParentStream}));
    const std::uint64_t n_parents = parent_rng.poisson(cfg.m2 * cfg.lambda_p2 * window.area());
    for (std::uint64_t i = 0; i < n_parents; ++i) {
        out.cluster_parents.push_back({parent_rng.uniform(window.x_min, window.x_max),
                                       parent_rng.uniform(window.y_min, window.y_max)});
    }

    RandomStream child_rng(derive_seed(seed, {kChildStream}));
    const double disc_area = std::numbers::pi * cfg.r_c * cfg.r_c;
    for (std::size_t p = 0; p < out.cluster_parents.size(); ++p) {
        const Point& c = out.cluster_parents[p];
        const std::uint64_t n_children = child_rng.poisson(cfg.lambda_c2 * disc_area);
        for (std::uint64_t j = 0; j < n_children; ++j) {
            // Uniform on the disc: radius via sqrt of a uniform.
            const double r = cfg.r_c * std::sqrt(child_rng.uniform01());
            const double phi = child_rng.uniform(0.0, 2.0 * std::numbers::pi);
            out.points.push_back({c.x + r * std::cos(phi), c.y + r * std::sin(phi)});
            out.parent.push_back(static_cast<std::int64_t>(p));
        }
    }
    return out;
}

namespace {

// Uniform bucket grid over the UAV bounding box. Ring-expanding nearest
// search; exact tie-break on (squared distance, index).
class NearestUavIndex {
public:
    explicit NearestUavIndex(const PointPattern& uavs) : uavs_(uavs) {
        const std::size_t n = uavs.size();
        lo_ = uavs.points[0];
        hi_ = uavs.points[0];
        for (const Point& p : uavs.points) {
            lo_.x = std::min(lo_.x, p.x);
            lo_.y = std::min(lo_.y, p.y);
            hi_.x = std::max(hi_.x, p.x);
            hi_.y = std::max(hi_.y, p.y);
        }
        const double w = std::max(hi_.x - lo_.x, 1e-9);
        const double h = std::max(hi_.y - lo_.y, 1e-9);
        cells_per_side_ = std::max<std::size_t>(
            1, static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(n)))));
        cell_w_ = w / static_cast<double>(cells_per_side_);
        cell_h_ = h / static_cast<double>(cells_per_side_);
        buckets_.resize(cells_per_side_ * cells_per_side_);
        for (std::size_t i = 0; i < n; ++i) {
            buckets_[bucket_of(uavs.points[i])].push_back(i);
        }
    }

    std::size_t nearest(const Point& q) const {
        const auto [cx, cy] = cell_coords(q);
        double best_d2 = std::numeric_limits<double>::infinity();
        std::size_t best_i = 0;
        bool found = false;
        const std::size_t max_ring = cells_per_side_;
        for (std::size_t ring = 0; ring <= max_ring; ++ring) {
            if (found) {
                // A hit at ring r rules out anything beyond the ring whose
                // nearest edge is farther than the current best distance.
                const double ring_gap =
                    (static_cast<double>(ring) - 1.0) * std::min(cell_w_, cell_h_);
                if (ring_gap > 0.0 && ring_gap * ring_gap > best_d2) break;
            }
            scan_ring(q, cx, cy, ring, best_d2, best_i, found);
        }
        return best_i;
    }

private:
    std::pair<std::size_t, std::size_t> cell_coords(const Point& p) const {
        const auto clamp_cell = [this](double v) {
            if (v < 0.0) return std::size_t{0};
            const auto c = static_cast<std::size_t>(v);
            return std::min(c, cells_per_side_ - 1);
        };
        return {clamp_cell((p.x - lo_.x) / cell_w_), clamp_cell((p.y - lo_.y) / cell_h_)};
    }

    std::size_t bucket_of(const Point& p) const {
        const auto [cx, cy] = cell_coords(p);
        return cy * cells_per_side_ + cx;
    }

    void scan_ring(const Point& q, std::size_t cx, std::size_t cy, std::size_t ring,
                   double& best_d2, std::size_t& best_i, bool& found) const {
        const auto scan_cell = [&](std::int64_t gx, std::int64_t gy) {
            if (gx < 0 || gy < 0 || gx >= static_cast<std::int64_t>(cells_per_side_) ||
                gy >= static_cast<std::int64_t>(cells_per_side_)) {
                return;
            }
            for (std::size_t i : buckets_[static_cast<std::size_t>(gy) * cells_per_side_ +
                                          static_cast<std::size_t>(gx)]) {
                const double d2 = squared_distance(q, uavs_.points[i]);
                if (d2 < best_d2 || (d2 == best_d2 && found && i < best_i)) {
                    best_d2 = d2;
                    best_i = i;
                    found = true;
                }
            }
        };
        const auto x0 = static_cast<std::int64_t>(cx);
        const auto y0 = static_cast<std::int64_t>(cy);
        const auto r = static_cast<std::int64_t>(ring);
        if (ring == 0) {
            scan_cell(x0, y0);
            return;
        }
        for (std::int64_t d = -r; d <= r; ++d) {
            scan_cell(x0 + d, y0 - r);
            scan_cell(x0 + d, y0 + r);
        }
        for (std::int64_t d = -r + 1; d <= r - 1; ++d) {
            scan_cell(x0 - r, y0 + d);
            scan_cell(x0 + r, y0 + d);
        }
    }

    const PointPattern& uavs_;
    Point lo_, hi_;
    std::size_t cells_per_side_ = 1;
    double cell_w_ = 1.0, cell_h_ = 1.0;
    std::vector<std::vector<std::size_t>> buckets_;
};

}  // namespace

AssociationMap associate_nearest(const PointPattern& ground, const PointPattern& uavs) {
    if (uavs.size() == 0) throw EmptyUavSet();
    AssociationMap out;
    out.assignment.resize(ground.size());
    out.load.assign(uavs.size(), 0);
    NearestUavIndex index(uavs);
    for (std::size_t g = 0; g < ground.size(); ++g) {
        const std::size_t u = index.nearest(ground.points[g]);
        out.assignment[g] = u;
        ++out.load[u];
    }
    return out;
}

double scheduling_probability(const AssociationMap& assoc, std::size_t uav) {
    if (uav >= assoc.load.size()) throw IndexOutOfRange("uav", uav);
    if (assoc.load[uav] == 0) throw NoAssociatedNodes(uav);
    return 1.0 / static_cast<double>(assoc.load[uav]);
}

void write_pattern_csv(const PointPattern& pattern, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path);
    out << "x,y,origin\n";
    out.precision(17);
    for (std::size_t i = 0; i < pattern.size(); ++i) {
        out << pattern.points[i].x << ',' << pattern.points[i].y << ',';
        if (pattern.is_cluster_born(i)) {
            out << "cluster:" << pattern.parent[i] << '\n';
        } else {
            out << "ppp\n";
        }
    }
    if (!out) throw IoError("failed writing " + path);
}

}  // namespace aoi
