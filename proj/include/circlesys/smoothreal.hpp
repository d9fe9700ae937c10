#pragma once

#include "circlesys/procsim.hpp"
#include "circlesys/ratarith.hpp"

#include <cstdint>
#include <memory>
#include <utility>
#include <vector>

namespace circlesys {

struct Vec2 {
    double x = 0, y = 0;
    friend bool operator==(const Vec2&, const Vec2&) = default;
};

// A point together with the derivative of a map there (row-major 2x2).
struct Jet {
    Vec2 p;
    double j[2][2] = {{1, 0}, {0, 1}};
    double det() const { return j[0][0] * j[1][1] - j[0][1] * j[1][0]; }
};

struct Rect {
    double x0 = 0, y0 = 0, x1 = 1, y1 = 1;
    double width() const { return x1 - x0; }
    double height() const { return y1 - y0; }
    bool contains(Vec2 p) const { return p.x >= x0 && p.x < x1 && p.y >= y0 && p.y < y1; }
};

// Evaluable invertible self-map, identity outside `support`.
class PlaneMap {
public:
    struct Impl {
        virtual ~Impl() = default;
        virtual Vec2 fwd(Vec2 p) const = 0;
        virtual Vec2 inv(Vec2 p) const = 0;
        virtual Jet jet(Vec2 p) const = 0;
        // distance from p to the set where the map fails to be smooth
        virtual double kink_distance(Vec2) const { return 1e300; }
    };

    PlaneMap() = default;
    PlaneMap(std::shared_ptr<const Impl> impl, Rect support, double margin, bool analytic_area)
        : support(support), margin(margin), analytic_area(analytic_area), impl_(std::move(impl)) {}

    static PlaneMap identity(Rect support = {});

    Vec2 operator()(Vec2 p) const { return impl_ ? impl_->fwd(p) : p; }
    Vec2 inverse(Vec2 p) const { return impl_ ? impl_->inv(p) : p; }
    Jet jet(Vec2 p) const;
    double kink_distance(Vec2 p) const { return impl_ ? impl_->kink_distance(p) : 1e300; }
    PlaneMap inverted() const;

    Rect support;
    double margin = 0;          // width of the band inside `support` where the map is the identity
    bool analytic_area = true;  // area preservation holds by construction (false: only sampled)

private:
    std::shared_ptr<const Impl> impl_;
};

// Applies maps[0] first.
PlaneMap chain(const std::vector<PlaneMap>& maps);

// Zig-zag numbering of an m x n grid: row 0 left to right, row 1 right to left, ...
std::uint64_t zigzag_index(std::uint64_t m, std::uint64_t col, std::uint64_t row);
std::pair<std::uint64_t, std::uint64_t> zigzag_cell(std::uint64_t m, std::uint64_t index); // (col, row)

struct SwapSpec {
    std::uint64_t m = 2, n = 1;           // columns, rows
    std::uint64_t first = 0, second = 1;  // zig-zag labels, must be k and k+1
    double delta = 0.05;
    double gamma = 0;                     // 0 picks the default from delta
    Rect region;                          // the grid covers this rectangle
};

// Geometry of one approximate swap in the normalized [-1,1]^2 pair square.
struct SwapGeometry {
    double inner = 1;   // half-side of the square handed to the disk map
    double radius = 1;  // disk radius
    double gamma = 0;   // twist band width; the disk of radius radius-gamma turns by pi
    double flat = 0;    // f vanishes on [radius-flat, radius]
};
SwapGeometry swap_geometry(double delta, double gamma = 0);

PlaneMap approx_swap(const SwapSpec& spec);

// The twist F in polar coordinates (r, theta) -> (r, theta + f(r)), exposed for Jacobian checks.
Vec2 twist_polar(const SwapGeometry& geo, Vec2 polar);
double twist_angle(const SwapGeometry& geo, double r);

// Adjacent transpositions (k, k+1) of zig-zag labels; applying them in order sends c to sigma[c].
std::vector<std::pair<std::uint64_t, std::uint64_t>> perm_to_swaps(const std::vector<std::uint64_t>& sigma);

struct ObedienceReport {
    std::vector<double> per_cell; // indexed by zig-zag label; 1 for cells with no samples
    std::vector<std::uint64_t> samples_per_cell;
    double fraction = 1;          // over all samples
    std::uint64_t samples = 0;
    double delta = 0;             // per-swap smoothing used
    std::size_t swaps = 0;
};

// Fraction of uniform samples x in `region` with map(x) in the cell sigma(cell(x)).
ObedienceReport measure_obedience(const PlaneMap& map, const std::vector<std::uint64_t>& sigma, std::uint64_t m,
                                  std::uint64_t n, Rect region, std::uint64_t samples, std::uint64_t seed);

struct Realization {
    PlaneMap map;
    ObedienceReport report;
};

inline constexpr double kMinDelta = 1e-9;

// sigma over zig-zag labels of the m x n grid on `region`.  Per-swap delta = eps/#swaps.
// Throws ToleranceError if that delta is below kMinDelta or the sampled fraction misses 1-eps.
Realization realize_perm(const std::vector<std::uint64_t>& sigma, std::uint64_t m, std::uint64_t n, double eps,
                         std::uint64_t samples, std::uint64_t seed, Rect region = {});

// Sampled Jacobian determinants from the exact jet, skipping points within `guard` of a kink.
struct JacobianReport {
    double max_dev = 0; // max |det - 1|
    std::uint64_t checked = 0, skipped = 0;
};
JacobianReport sample_jacobian(const PlaneMap& map, std::uint64_t samples, std::uint64_t seed, double guard = 1e-7);
// Central differences of step h, for comparison with the exact jet.
Jet finite_difference_jet(const PlaneMap& map, Vec2 p, double h);

struct SmoothConfig {
    double eps = 0.05;            // h^s_m gets exceptional mass eps * 2^(1-m)
    std::uint64_t samples = 4000; // per realize_perm obedience check
    std::uint64_t seed = 1;
};

// S_n = H_n R_{alpha_n} H_n^{-1} on the torus [0,1)^2, H_n = h^s_1 ... h^s_n.
class StageMap {
public:
    int stage() const { return stage_; }
    const Params& params() const { return params_; }
    Vec2 operator()(Vec2 p) const;
    Vec2 inverse(Vec2 p) const;
    Vec2 conj(Vec2 p) const { return H_(p); }      // H_n
    Vec2 conj_inv(Vec2 p) const { return H_.inverse(p); }
    const PlaneMap& conjugacy() const { return H_; }
    double alpha() const { return alpha_; }

    friend StageMap stage_map(const Params& params, const std::vector<std::vector<std::vector<std::int64_t>>>& words,
                              int n, const SmoothConfig& cfg);

private:
    int stage_ = 0;
    Params params_;
    double alpha_ = 0;
    PlaneMap H_;
};

// The smooth h^s_{n+1}: h_{n+1}'s first column block realized on [0,1/q_n] x [0,1], copied to every block.
PlaneMap smooth_h(const Params& params, const HData& h, double eps, std::uint64_t samples, std::uint64_t seed);

StageMap stage_map(const Params& params, const std::vector<std::vector<std::vector<std::int64_t>>>& words, int n,
                   const SmoothConfig& cfg = {});

// Distance on the torus in x, plain in y.
double torus_distance(Vec2 a, Vec2 b);
// Sampled distances between two stage maps over the same uniform points.
struct Proximity {
    double sup = 0;     // max over the samples
    double mean = 0;
    double ky_fan = 0;  // least t with sampled P(dist > t) <= t
};
Proximity sampled_proximity(const StageMap& a, const StageMap& b, std::uint64_t samples, std::uint64_t seed);

struct TrajectoryReport {
    double match_fraction = 0;
    std::uint64_t samples = 0, matched = 0;
};
// For sampled x: the coarse cells of the h_1 grid visited by S_n^j x, j < q_n, against the tau_n tower
// of the grid atom holding H_n^{-1} x.
TrajectoryReport trajectory_match(const StageMap& smap, const GridProcess& proc, std::uint64_t samples,
                                  std::uint64_t seed);

} // namespace circlesys
