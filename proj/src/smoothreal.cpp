#include "circlesys/smoothreal.hpp"
#include "circlesys/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <random>

namespace circlesys {

namespace {

constexpr double kPi = std::numbers::pi;

// forward-mode derivative in two directions
struct Dual {
    double v = 0, dx = 0, dy = 0;
    Dual() = default;
    Dual(double c) : v(c) {}
    Dual(double c, double a, double b) : v(c), dx(a), dy(b) {}
};
Dual operator+(Dual a, Dual b) { return {a.v + b.v, a.dx + b.dx, a.dy + b.dy}; }
Dual operator-(Dual a, Dual b) { return {a.v - b.v, a.dx - b.dx, a.dy - b.dy}; }
Dual operator-(Dual a) { return {-a.v, -a.dx, -a.dy}; }
Dual operator*(Dual a, Dual b) { return {a.v * b.v, a.dx * b.v + a.v * b.dx, a.dy * b.v + a.v * b.dy}; }
Dual operator/(Dual a, Dual b) {
    const double inv = 1 / b.v;
    return {a.v * inv, (a.dx - a.v * inv * b.dx) * inv, (a.dy - a.v * inv * b.dy) * inv};
}
Dual sin(Dual a) { return {std::sin(a.v), std::cos(a.v) * a.dx, std::cos(a.v) * a.dy}; }
Dual cos(Dual a) { return {std::cos(a.v), -std::sin(a.v) * a.dx, -std::sin(a.v) * a.dy}; }
Dual exp(Dual a) {
    const double e = std::exp(a.v);
    return {e, e * a.dx, e * a.dy};
}
Dual sqrt(Dual a) {
    const double r = std::sqrt(a.v);
    return {r, a.dx / (2 * r), a.dy / (2 * r)};
}
Dual atan2(Dual y, Dual x) {
    const double d = x.v * x.v + y.v * y.v;
    return {std::atan2(y.v, x.v), (x.v * y.dx - y.v * x.dx) / d, (x.v * y.dy - y.v * x.dy) / d};
}
double val(double a) { return a; }
double val(Dual a) { return a.v; }

using std::atan2;
using std::cos;
using std::exp;
using std::sin;
using std::sqrt;

// smooth 0 -> 1 transition on [0,1] built from exp(-1/t)
template <class T> T smooth_step(T t) {
    if (val(t) <= 0) return T(0);
    if (val(t) >= 1) return T(1);
    const T a = exp(T(-1) / t), b = exp(T(-1) / (T(1) - t));
    return a / (a + b);
}

template <class T> T twist(const SwapGeometry& g, T r) {
    return T(kPi) * smooth_step((T(g.radius - g.flat) - r) / T(g.gamma - g.flat));
}

// [-1,1]^2 -> unit disk, concentric squares to concentric circles; constant Jacobian pi/4
template <class T> void square_to_disk(T u, T v, T& X, T& Y) {
    T r, phi;
    if (std::abs(val(u)) > std::abs(val(v))) {
        r = u;
        phi = T(kPi / 4) * (v / u);
    } else if (val(v) != 0) {
        r = v;
        phi = T(kPi / 2) - T(kPi / 4) * (u / v);
    } else {
        X = T(0);
        Y = T(0);
        return;
    }
    X = r * cos(phi);
    Y = r * sin(phi);
}

template <class T> void disk_to_square(T X, T Y, T& u, T& v) {
    const T r = sqrt(X * X + Y * Y);
    if (val(r) == 0) {
        u = T(0);
        v = T(0);
        return;
    }
    T psi = atan2(Y, X);
    if (val(psi) < -kPi / 4) psi = psi + T(2 * kPi);
    const T c = T(4 / kPi);
    if (val(psi) < kPi / 4) {
        u = r;
        v = c * psi * r;
    } else if (val(psi) < 3 * kPi / 4) {
        v = r;
        u = c * (T(kPi / 2) - psi) * r;
    } else if (val(psi) < 5 * kPi / 4) {
        u = -r;
        v = -(c * (psi - T(kPi)) * r);
    } else {
        v = -r;
        u = -(c * (T(3 * kPi / 2) - psi) * r);
    }
}

struct PairFrame {
    double cx, cy, hx, hy; // centre and half extents of the pair rectangle
    bool vertical;         // long side along y: conjugate by the coordinate swap
};

class SwapImpl final : public PlaneMap::Impl {
public:
    SwapImpl(PairFrame f, SwapGeometry g) : f_(f), g_(g) {}

    Vec2 fwd(Vec2 p) const override { return apply(p, 1.0); }
    Vec2 inv(Vec2 p) const override { return apply(p, -1.0); }
    Jet jet(Vec2 p) const override {
        Jet out;
        Dual x(p.x, 1, 0), y(p.y, 0, 1), ox, oy;
        if (!run(x, y, ox, oy, 1.0)) {
            out.p = p;
            return out;
        }
        out.p = {ox.v, oy.v};
        out.j[0][0] = ox.dx;
        out.j[0][1] = ox.dy;
        out.j[1][0] = oy.dx;
        out.j[1][1] = oy.dy;
        return out;
    }

    // kinks: the diagonals of the pair square where the twist is active, before and after it
    double kink_distance(Vec2 p) const override {
        const double a = (p.x - f_.cx) / f_.hx, b = (p.y - f_.cy) / f_.hy;
        const double rad = g_.radius * std::max(std::abs(a), std::abs(b)) / g_.inner;
        if (rad <= g_.radius - g_.gamma || rad >= g_.radius - g_.flat) return 1e300;
        const Vec2 img = fwd(p);
        const double a2 = (img.x - f_.cx) / f_.hx, b2 = (img.y - f_.cy) / f_.hy;
        const double scale = std::min(f_.hx, f_.hy);
        const double d = std::min(std::abs(std::abs(a) - std::abs(b)), std::abs(std::abs(a2) - std::abs(b2)));
        return d * scale / std::sqrt(2.0);
    }

private:
    Vec2 apply(Vec2 p, double dir) const {
        double ox = 0, oy = 0;
        if (!run(p.x, p.y, ox, oy, dir)) return p;
        return {ox, oy};
    }

    // false means identity at this point; the caller returns the input untouched
    template <class T> bool run(T x, T y, T& ox, T& oy, double dir) const {
        T a = (x - T(f_.cx)) / T(f_.hx), b = (y - T(f_.cy)) / T(f_.hy);
        if (std::abs(val(a)) >= 1 || std::abs(val(b)) >= 1) return false;
        if (f_.vertical) std::swap(a, b);
        const double s0 = g_.inner;
        if (std::max(std::abs(val(a)), std::abs(val(b))) >= s0) return false;
        T na, nb;
        // radius in the disk is R * max(|u|,|v|), so the band tests need no disk map
        const double rad = g_.radius * std::max(std::abs(val(a)), std::abs(val(b))) / s0;
        if (rad >= g_.radius - g_.flat) return false;
        if (rad <= g_.radius - g_.gamma) {
            // turning by pi is the point reflection in the pair square
            na = -a;
            nb = -b;
        } else {
            T X, Y;
            square_to_disk(a / T(s0), b / T(s0), X, Y);
            X = X * T(g_.radius);
            Y = Y * T(g_.radius);
            const T r = sqrt(X * X + Y * Y);
            const T th = T(dir) * twist(g_, r);
            const T c = cos(th), s = sin(th);
            const T X2 = X * c - Y * s, Y2 = X * s + Y * c;
            T u, v;
            disk_to_square(X2 / T(g_.radius), Y2 / T(g_.radius), u, v);
            na = u * T(s0);
            nb = v * T(s0);
        }
        if (f_.vertical) std::swap(na, nb);
        ox = na * T(f_.hx) + T(f_.cx);
        oy = nb * T(f_.hy) + T(f_.cy);
        return true;
    }

    PairFrame f_;
    SwapGeometry g_;
};

class ChainImpl final : public PlaneMap::Impl {
public:
    explicit ChainImpl(std::vector<PlaneMap> maps) : maps_(std::move(maps)) {}
    Vec2 fwd(Vec2 p) const override {
        for (const auto& m : maps_)
            if (m.support.contains(p)) p = m(p);
        return p;
    }
    Vec2 inv(Vec2 p) const override {
        for (auto it = maps_.rbegin(); it != maps_.rend(); ++it)
            if (it->support.contains(p)) p = it->inverse(p);
        return p;
    }
    Jet jet(Vec2 p) const override {
        Jet acc;
        acc.p = p;
        for (const auto& m : maps_) {
            if (!m.support.contains(acc.p)) continue;
            const Jet step = m.jet(acc.p);
            Jet next;
            next.p = step.p;
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j) next.j[i][j] = step.j[i][0] * acc.j[0][j] + step.j[i][1] * acc.j[1][j];
            acc = next;
        }
        return acc;
    }
    double kink_distance(Vec2 p) const override {
        double d = 1e300;
        for (const auto& m : maps_) {
            if (!m.support.contains(p)) continue;
            d = std::min(d, m.kink_distance(p));
            p = m(p);
        }
        return d;
    }

private:
    std::vector<PlaneMap> maps_;
};

class InverseImpl final : public PlaneMap::Impl {
public:
    explicit InverseImpl(PlaneMap m) : m_(std::move(m)) {}
    Vec2 fwd(Vec2 p) const override { return m_.inverse(p); }
    Vec2 inv(Vec2 p) const override { return m_(p); }
    Jet jet(Vec2 p) const override {
        const Vec2 pre = m_.inverse(p);
        const Jet f = m_.jet(pre);
        const double d = f.det();
        Jet out;
        out.p = pre;
        out.j[0][0] = f.j[1][1] / d;
        out.j[0][1] = -f.j[0][1] / d;
        out.j[1][0] = -f.j[1][0] / d;
        out.j[1][1] = f.j[0][0] / d;
        return out;
    }
    double kink_distance(Vec2 p) const override { return m_.kink_distance(m_.inverse(p)); }

private:
    PlaneMap m_;
};

// one map on [0,w) x [0,1) repeated in every column block of width w
class PeriodicImpl final : public PlaneMap::Impl {
public:
    PeriodicImpl(PlaneMap cell, std::uint64_t copies) : cell_(std::move(cell)), copies_(copies) {}
    Vec2 fwd(Vec2 p) const override { return shift(p, false); }
    Vec2 inv(Vec2 p) const override { return shift(p, true); }
    Jet jet(Vec2 p) const override {
        const auto [i, local] = split(p);
        Jet j = cell_.jet(local);
        j.p.x += offset(i);
        return j;
    }
    double kink_distance(Vec2 p) const override { return cell_.kink_distance(split(p).second); }

private:
    double offset(std::uint64_t i) const { return static_cast<double>(i) / static_cast<double>(copies_); }
    std::pair<std::uint64_t, Vec2> split(Vec2 p) const {
        auto i = static_cast<std::uint64_t>(std::floor(p.x * static_cast<double>(copies_)));
        i = std::min(i, copies_ - 1);
        return {i, Vec2{p.x - offset(i), p.y}};
    }
    Vec2 shift(Vec2 p, bool inverse) const {
        const auto [i, local] = split(p);
        if (!cell_.support.contains(local)) return p;
        Vec2 out = inverse ? cell_.inverse(local) : cell_(local);
        out.x += offset(i);
        return out;
    }
    PlaneMap cell_;
    std::uint64_t copies_;
};

double wrap01(double x) {
    x -= std::floor(x);
    return x >= 1 ? 0 : x;
}

} // namespace

PlaneMap PlaneMap::identity(Rect support) { return PlaneMap(nullptr, support, 0, true); }

Jet PlaneMap::jet(Vec2 p) const {
    if (impl_) return impl_->jet(p);
    Jet j;
    j.p = p;
    return j;
}

PlaneMap PlaneMap::inverted() const {
    if (!impl_) return *this;
    return PlaneMap(std::make_shared<InverseImpl>(*this), support, margin, analytic_area);
}

PlaneMap chain(const std::vector<PlaneMap>& maps) {
    if (maps.empty()) return PlaneMap::identity();
    Rect box = maps.front().support;
    double margin = maps.front().margin;
    bool analytic = true;
    for (const auto& m : maps) {
        box.x0 = std::min(box.x0, m.support.x0);
        box.y0 = std::min(box.y0, m.support.y0);
        box.x1 = std::max(box.x1, m.support.x1);
        box.y1 = std::max(box.y1, m.support.y1);
        margin = std::min(margin, m.margin);
        analytic = analytic && m.analytic_area;
    }
    return PlaneMap(std::make_shared<ChainImpl>(maps), box, margin, analytic);
}

std::uint64_t zigzag_index(std::uint64_t m, std::uint64_t col, std::uint64_t row) {
    return row * m + (row % 2 == 0 ? col : m - 1 - col);
}

std::pair<std::uint64_t, std::uint64_t> zigzag_cell(std::uint64_t m, std::uint64_t index) {
    const std::uint64_t row = index / m, pos = index % m;
    return {row % 2 == 0 ? pos : m - 1 - pos, row};
}

SwapGeometry swap_geometry(double delta, double gamma) {
    if (!(delta > 0 && delta < 0.5)) throw InputError("swap smoothing delta must lie in (0, 1/2)");
    // pair square [-1,1]^2 has area 4 = twice the pair's [0,2]x[0,1]; the identity frame and the
    // twist band each take delta of it, i.e. delta/2 of the pair
    SwapGeometry g;
    g.inner = std::sqrt(1 - delta / 4);
    g.radius = 2 * g.inner / std::sqrt(kPi);
    const double turned = std::sqrt((4 - 2 * delta) / kPi);
    g.gamma = gamma > 0 ? gamma : g.radius - turned;
    if (!(g.gamma > 0 && g.gamma < g.radius)) throw InputError("swap band width out of range");
    g.flat = g.gamma / 8;
    return g;
}

double twist_angle(const SwapGeometry& geo, double r) { return twist(geo, r); }

Vec2 twist_polar(const SwapGeometry& geo, Vec2 polar) { return {polar.x, polar.y + twist(geo, polar.x)}; }

PlaneMap approx_swap(const SwapSpec& spec) {
    const std::uint64_t cells = spec.m * spec.n;
    if (spec.m == 0 || spec.n == 0) throw InputError("empty grid");
    if (spec.first >= cells || spec.second >= cells) throw InputError("swap label outside the grid");
    const std::uint64_t lo = std::min(spec.first, spec.second), hi = std::max(spec.first, spec.second);
    if (hi != lo + 1) throw InputError("swap of non-adjacent zig-zag labels " + std::to_string(spec.first) + "," +
                                       std::to_string(spec.second));
    const SwapGeometry geo = swap_geometry(spec.delta, spec.gamma);
    const auto [c0, r0] = zigzag_cell(spec.m, lo);
    const auto [c1, r1] = zigzag_cell(spec.m, hi);
    const double cw = spec.region.width() / static_cast<double>(spec.m);
    const double ch = spec.region.height() / static_cast<double>(spec.n);
    Rect pair;
    pair.x0 = spec.region.x0 + static_cast<double>(std::min(c0, c1)) * cw;
    pair.y0 = spec.region.y0 + static_cast<double>(std::min(r0, r1)) * ch;
    pair.x1 = spec.region.x0 + static_cast<double>(std::max(c0, c1) + 1) * cw;
    pair.y1 = spec.region.y0 + static_cast<double>(std::max(r0, r1) + 1) * ch;
    PairFrame f{(pair.x0 + pair.x1) / 2, (pair.y0 + pair.y1) / 2, pair.width() / 2, pair.height() / 2, r0 != r1};
    const double margin = (1 - geo.inner) * std::min(f.hx, f.hy);
    return PlaneMap(std::make_shared<SwapImpl>(f, geo), pair, margin, true);
}

std::vector<std::pair<std::uint64_t, std::uint64_t>> perm_to_swaps(const std::vector<std::uint64_t>& sigma) {
    const std::size_t N = sigma.size();
    std::vector<std::uint64_t> inv(N, N);
    for (std::size_t c = 0; c < N; ++c) {
        if (sigma[c] >= N || inv[sigma[c]] != N) throw InputError("not a bijection");
        inv[sigma[c]] = c;
    }
    // at[pos] = label currently sitting at pos; bring label inv[p] to p by moving it left
    std::vector<std::uint64_t> at(N), where(N);
    for (std::size_t i = 0; i < N; ++i) at[i] = where[i] = i;
    std::vector<std::pair<std::uint64_t, std::uint64_t>> out;
    for (std::size_t p = 0; p < N; ++p) {
        std::uint64_t j = where[inv[p]];
        while (j > p) {
            out.emplace_back(j - 1, j);
            std::swap(at[j - 1], at[j]);
            where[at[j - 1]] = j - 1;
            where[at[j]] = j;
            --j;
        }
    }
    return out;
}

ObedienceReport measure_obedience(const PlaneMap& map, const std::vector<std::uint64_t>& sigma, std::uint64_t m,
                                  std::uint64_t n, Rect region, std::uint64_t samples, std::uint64_t seed) {
    if (sigma.size() != m * n) throw InputError("permutation size does not match the grid");
    ObedienceReport rep;
    rep.samples = samples;
    std::vector<std::uint64_t> good(m * n, 0);
    rep.samples_per_cell.assign(m * n, 0);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ux(region.x0, region.x1), uy(region.y0, region.y1);
    const double cw = region.width() / static_cast<double>(m), ch = region.height() / static_cast<double>(n);
    auto cell_of = [&](Vec2 p) -> std::optional<std::uint64_t> {
        if (!region.contains(p)) return std::nullopt;
        auto c = std::min(m - 1, static_cast<std::uint64_t>((p.x - region.x0) / cw));
        auto r = std::min(n - 1, static_cast<std::uint64_t>((p.y - region.y0) / ch));
        return zigzag_index(m, c, r);
    };
    std::uint64_t total_good = 0;
    for (std::uint64_t i = 0; i < samples; ++i) {
        const Vec2 p{ux(rng), uy(rng)};
        const auto home = cell_of(p);
        if (!home) continue;
        ++rep.samples_per_cell[*home];
        const auto there = cell_of(map(p));
        if (there && *there == sigma[*home]) {
            ++good[*home];
            ++total_good;
        }
    }
    rep.per_cell.resize(m * n);
    for (std::size_t c = 0; c < m * n; ++c)
        rep.per_cell[c] = rep.samples_per_cell[c] ? static_cast<double>(good[c]) / static_cast<double>(rep.samples_per_cell[c]) : 1.0;
    rep.fraction = samples ? static_cast<double>(total_good) / static_cast<double>(samples) : 1.0;
    return rep;
}

Realization realize_perm(const std::vector<std::uint64_t>& sigma, std::uint64_t m, std::uint64_t n, double eps,
                         std::uint64_t samples, std::uint64_t seed, Rect region) {
    if (!(eps > 0 && eps < 1)) throw InputError("eps must lie in (0,1)");
    if (sigma.size() != m * n) throw InputError("permutation size does not match the grid");
    const auto swaps = perm_to_swaps(sigma);
    Realization out;
    std::vector<PlaneMap> maps;
    double delta = 0;
    if (!swaps.empty()) {
        // exceptional sets add up along the composition
        delta = std::min(eps / static_cast<double>(swaps.size()), 0.49);
        if (delta < kMinDelta)
            throw ToleranceError("per-swap budget below the smallest usable smoothing", kMinDelta * static_cast<double>(swaps.size()));
        for (const auto& [a, b] : swaps) {
            SwapSpec spec;
            spec.m = m;
            spec.n = n;
            spec.first = a;
            spec.second = b;
            spec.delta = delta;
            spec.region = region;
            maps.push_back(approx_swap(spec));
        }
    }
    out.map = maps.empty() ? PlaneMap::identity(region) : chain(maps);
    out.map.support = region;
    out.report = measure_obedience(out.map, sigma, m, n, region, samples, seed);
    out.report.delta = delta;
    out.report.swaps = swaps.size();
    if (out.report.fraction < 1 - eps)
        throw ToleranceError("sampled obedience below 1-eps", 1 - out.report.fraction);
    return out;
}

Jet finite_difference_jet(const PlaneMap& map, Vec2 p, double h) {
    Jet j;
    j.p = map(p);
    const Vec2 xp = map({p.x + h, p.y}), xm = map({p.x - h, p.y});
    const Vec2 yp = map({p.x, p.y + h}), ym = map({p.x, p.y - h});
    j.j[0][0] = (xp.x - xm.x) / (2 * h);
    j.j[1][0] = (xp.y - xm.y) / (2 * h);
    j.j[0][1] = (yp.x - ym.x) / (2 * h);
    j.j[1][1] = (yp.y - ym.y) / (2 * h);
    return j;
}

JacobianReport sample_jacobian(const PlaneMap& map, std::uint64_t samples, std::uint64_t seed, double guard) {
    JacobianReport rep;
    std::mt19937_64 rng(seed);
    const Rect r = map.support;
    std::uniform_real_distribution<double> ux(r.x0, r.x1), uy(r.y0, r.y1);
    for (std::uint64_t i = 0; i < samples; ++i) {
        const Vec2 p{ux(rng), uy(rng)};
        if (map.kink_distance(p) < guard) {
            ++rep.skipped;
            continue;
        }
        const Jet j = map.jet(p);
        ++rep.checked;
        rep.max_dev = std::max(rep.max_dev, std::abs(j.det() - 1));
    }
    return rep;
}

PlaneMap smooth_h(const Params& P, const HData& h, double eps, std::uint64_t samples, std::uint64_t seed) {
    const int n = h.stage;
    const std::uint64_t q = P.q64(n);
    const auto k = static_cast<std::uint64_t>(P.k.at(n));
    const GridPermutation& g = h.perm;
    if (g.cols != k * q) throw InputError("h grid does not match k_n q_n columns");
    // sigma on the first block, in zig-zag labels of the k x rows grid
    std::vector<std::uint64_t> sigma(k * g.rows);
    for (std::uint64_t c = 0; c < k; ++c)
        for (std::uint64_t r = 0; r < g.rows; ++r) {
            const std::uint64_t to = g(g.index(c, r));
            if (g.col(to) >= k) throw InputError("h moves atoms between column blocks");
            sigma[zigzag_index(k, c, r)] = zigzag_index(k, g.col(to), g.row(to));
        }
    Rect block{0, 0, 1.0 / static_cast<double>(q), 1};
    auto real = realize_perm(sigma, k, g.rows, eps, samples, seed, block);
    return PlaneMap(std::make_shared<PeriodicImpl>(real.map, q), Rect{}, real.map.margin, true);
}

StageMap stage_map(const Params& P, const std::vector<std::vector<std::vector<std::int64_t>>>& words, int n,
                   const SmoothConfig& cfg) {
    if (n < 0 || n > P.top_stage()) throw InputError("stage outside the parameter list");
    if (static_cast<int>(words.size()) < n) throw InputError("word data missing for stage " + std::to_string(n));
    StageMap sm;
    sm.stage_ = n;
    sm.params_ = P;
    sm.alpha_ = static_cast<double>(P.alpha.at(n));
    std::vector<PlaneMap> hs;
    for (int m = 1; m <= n; ++m) {
        const HData h = h_from_words(P, m - 1, words[m - 1]);
        const double eps = std::min(cfg.eps / static_cast<double>(std::uint64_t{1} << (m - 1)), 0.99);
        hs.push_back(smooth_h(P, h, eps, cfg.samples, cfg.seed + static_cast<std::uint64_t>(m)));
    }
    // H_n = h^s_1 o ... o h^s_n applies h^s_n first
    std::reverse(hs.begin(), hs.end());
    sm.H_ = hs.empty() ? PlaneMap::identity() : chain(hs);
    return sm;
}

Vec2 StageMap::operator()(Vec2 p) const {
    Vec2 y = H_.inverse(p);
    y.x = wrap01(y.x + alpha_);
    return H_(y);
}

Vec2 StageMap::inverse(Vec2 p) const {
    Vec2 y = H_.inverse(p);
    y.x = wrap01(y.x - alpha_);
    return H_(y);
}

double torus_distance(Vec2 a, Vec2 b) {
    double dx = std::abs(a.x - b.x);
    dx = std::min(dx, 1 - dx);
    return std::hypot(dx, a.y - b.y);
}

Proximity sampled_proximity(const StageMap& a, const StageMap& b, std::uint64_t samples, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0, 1);
    std::vector<double> d(samples);
    for (auto& v : d) {
        const Vec2 p{u(rng), u(rng)};
        v = torus_distance(a(p), b(p));
    }
    Proximity out;
    if (d.empty()) return out;
    std::sort(d.begin(), d.end(), std::greater<>());
    out.sup = d.front();
    for (double v : d) out.mean += v;
    out.mean /= static_cast<double>(d.size());
    // with d sorted descending, P(dist > t) <= i/N for every t >= d[i]
    const double N = static_cast<double>(d.size());
    out.ky_fan = 1;
    for (std::size_t i = 0; i < d.size(); ++i) out.ky_fan = std::min(out.ky_fan, std::max(d[i], static_cast<double>(i) / N));
    return out;
}

TrajectoryReport trajectory_match(const StageMap& smap, const GridProcess& proc, std::uint64_t samples,
                                  std::uint64_t seed) {
    const int n = smap.stage();
    if (n < 1 || proc.stage() < n) throw InputError("trajectory check needs a simulated stage >= 1");
    const Params& P = smap.params();
    const std::uint64_t q = P.q64(n);
    const std::uint64_t cols = proc.cols(), rows = proc.rows();
    const GridPermutation& h1 = proc.hs().at(0).perm;
    const GridPermutation rot = rotation_perm(P, n, cols, rows);
    const GridPermutation zn = proc.z(n);
    auto coarse_of_point = [&](Vec2 p) {
        auto c = std::min(h1.cols - 1, static_cast<std::uint64_t>(p.x * static_cast<double>(h1.cols)));
        auto r = std::min(h1.rows - 1, static_cast<std::uint64_t>(p.y * static_cast<double>(h1.rows)));
        return h1.index(c, r);
    };
    auto coarse_of_atom = [&](std::uint64_t a) {
        const std::uint64_t c = (a / rows) * h1.cols / cols, r = (a % rows) * h1.rows / rows;
        return h1.index(c, r);
    };
    TrajectoryReport rep;
    rep.samples = samples;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0, 1);
    for (std::uint64_t i = 0; i < samples; ++i) {
        const Vec2 x{u(rng), u(rng)};
        // the S_n tower through x is the H_n image of the rotation column through H_n^{-1} x
        const Vec2 y = smap.conj_inv(x);
        const auto yc = std::min(cols - 1, static_cast<std::uint64_t>(y.x * static_cast<double>(cols)));
        const auto yr = std::min(rows - 1, static_cast<std::uint64_t>(y.y * static_cast<double>(rows)));
        std::uint64_t atom = yc * rows + yr;
        Vec2 cur = x;
        bool ok = true;
        for (std::uint64_t j = 0; j < q && ok; ++j) {
            if (coarse_of_point(cur) != coarse_of_atom(zn(atom))) ok = false;
            cur = smap(cur);
            atom = rot(atom);
        }
        if (ok) ++rep.matched;
    }
    rep.match_fraction = samples ? static_cast<double>(rep.matched) / static_cast<double>(samples) : 1.0;
    return rep;
}

} // namespace circlesys
