#include "hexcube/chan_vese.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "hexcube/errors.hpp"

namespace hexcube {

double heaviside(double phi, double eps) {
    if (phi < -eps) return 1.0;
    if (phi > eps) return 0.0;
    return 0.5 * (1.0 - phi / eps - std::sin(M_PI * phi / eps) / M_PI);
}

namespace {

double delta_eps(double phi, double eps) {
    if (phi < -eps || phi > eps) return 0.0;
    return 0.5 / eps * (1.0 + std::cos(M_PI * phi / eps));
}

// Narrow-band reinitialization: exact sub-voxel distances on sign-change
// edges, then band-limited eikonal sweeps.  Values beyond the band keep their
// sign with magnitude clamped to at least band_half.
void reinit_band(std::vector<float>& phi, const GridLayout& L, double band_half) {
    const int nx = L.dims[0], ny = L.dims[1], nz = L.dims[2];
    const std::size_t n = phi.size();
    std::vector<float> dist(n, std::numeric_limits<float>::max());
    std::vector<std::size_t> band;

    auto idx = [&](int i, int j, int k) { return (static_cast<std::size_t>(k) * ny + j) * nx + i; };

    // Seed: for every axis edge with a sign change, both endpoints get their
    // linear-interpolation distance to the crossing.
    const int strides[3] = {1, nx, nx * ny};
    const int dims[3] = {nx, ny, nz};
    for (int k = 0; k < nz; ++k)
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i) {
                std::size_t a = idx(i, j, k);
                int pos[3] = {i, j, k};
                for (int axis = 0; axis < 3; ++axis) {
                    if (pos[axis] + 1 >= dims[axis]) continue;
                    std::size_t b = a + strides[axis];
                    float fa = phi[a], fb = phi[b];
                    if ((fa < 0) == (fb < 0)) continue;
                    float t = fa / (fa - fb);  // crossing at a + t toward b
                    if (t < dist[a]) dist[a] = t;
                    if (1.0f - t < dist[b]) dist[b] = 1.0f - t;
                }
            }

    for (std::size_t v = 0; v < n; ++v)
        if (dist[v] < std::numeric_limits<float>::max()) band.push_back(v);

    // Grow the band by breadth-first rings up to band_half voxels and relax
    // with eikonal updates (a few ordered passes suffice in a narrow band).
    std::vector<std::size_t> ring = band;
    std::vector<char> in_band(n, 0);
    for (auto v : band) in_band[v] = 1;
    int max_rings = static_cast<int>(std::ceil(band_half)) + 1;
    for (int r = 0; r < max_rings; ++r) {
        std::vector<std::size_t> next;
        for (auto v : ring) {
            int k = static_cast<int>(v / (static_cast<std::size_t>(nx) * ny));
            int j = static_cast<int>((v / nx) % ny);
            int i = static_cast<int>(v % nx);
            const int off[6][3] = {{-1, 0, 0}, {1, 0, 0},  {0, -1, 0},
                                   {0, 1, 0},  {0, 0, -1}, {0, 0, 1}};
            for (const auto& o : off) {
                int ni = i + o[0], nj = j + o[1], nk = k + o[2];
                if (ni < 0 || nj < 0 || nk < 0 || ni >= nx || nj >= ny || nk >= nz) continue;
                std::size_t w = idx(ni, nj, nk);
                if (!in_band[w]) {
                    in_band[w] = 1;
                    next.push_back(w);
                }
            }
        }
        band.insert(band.end(), next.begin(), next.end());
        ring = std::move(next);
        if (ring.empty()) break;
    }
    std::sort(band.begin(), band.end());

    auto relax = [&](std::size_t v) {
        int k = static_cast<int>(v / (static_cast<std::size_t>(nx) * ny));
        int j = static_cast<int>((v / nx) % ny);
        int i = static_cast<int>(v % nx);
        auto nb = [&](int axis, int dir) -> float {
            int p[3] = {i, j, k};
            p[axis] += dir;
            if (p[axis] < 0 || p[axis] >= dims[axis]) return std::numeric_limits<float>::max();
            return dist[idx(p[0], p[1], p[2])];
        };
        float a = std::min(nb(0, -1), nb(0, 1));
        float b = std::min(nb(1, -1), nb(1, 1));
        float c = std::min(nb(2, -1), nb(2, 1));
        float vmin[3] = {a, b, c};
        std::sort(vmin, vmin + 3);
        if (vmin[0] == std::numeric_limits<float>::max()) return;
        double x = vmin[0] + 1.0;
        if (x > vmin[1]) {
            double d01 = vmin[1] - vmin[0];
            x = 0.5 * (vmin[0] + vmin[1] + std::sqrt(std::max(0.0, 2.0 - d01 * d01)));
            if (x > vmin[2]) {
                double q = vmin[0] + vmin[1] + vmin[2];
                double disc = q * q - 3.0 * (static_cast<double>(vmin[0]) * vmin[0] +
                                             static_cast<double>(vmin[1]) * vmin[1] +
                                             static_cast<double>(vmin[2]) * vmin[2] - 1.0);
                x = (q + std::sqrt(std::max(0.0, disc))) / 3.0;
            }
        }
        if (x < dist[v]) dist[v] = static_cast<float>(x);
    };
    for (int pass = 0; pass < 3; ++pass) {
        for (std::size_t t = 0; t < band.size(); ++t) relax(band[t]);
        for (std::size_t t = band.size(); t-- > 0;) relax(band[t]);
    }

    const float cap = static_cast<float>(band_half);
    for (std::size_t v = 0; v < n; ++v) {
        float sign = phi[v] < 0 ? -1.0f : 1.0f;
        if (in_band[v] && dist[v] <= cap)
            phi[v] = sign * dist[v];
        else
            phi[v] = sign * std::max(cap, std::abs(phi[v]));
    }
}

struct Engine {
    const BinaryVolume& beta;
    double eps, dt0;
    GridLayout L;
    std::vector<float> phi;
    std::vector<std::size_t> band;
    double sum_h = 0.0, sum_hb = 0.0;  // running H and H*beta integrals
    double total_b = 0.0;
    long long neg_count = 0;

    Engine(const BinaryVolume& b, double eps_, double dt_, std::vector<float> phi0)
        : beta(b), eps(eps_), dt0(dt_), L(b.layout), phi(std::move(phi0)) {
        for (auto o : beta.occupancy) total_b += o;
        recompute_sums();
    }

    void recompute_sums() {
        sum_h = sum_hb = 0.0;
        neg_count = 0;
        for (std::size_t v = 0; v < phi.size(); ++v) {
            double h = heaviside(phi[v], eps);
            sum_h += h;
            sum_hb += h * beta.occupancy[v];
            if (phi[v] < 0) ++neg_count;
        }
    }

    void rebuild_band() {
        band.clear();
        const float lim = static_cast<float>(eps);
        for (std::size_t v = 0; v < phi.size(); ++v)
            if (std::abs(phi[v]) < lim) band.push_back(v);
    }

    double energy() const {
        const double V = static_cast<double>(phi.size());
        double B = sum_h, A = sum_hb, C = total_b;
        if (B < 0.5 || V - B < 0.5)
            throw EmptyInterface("a region emptied out (inside measure " + std::to_string(B) +
                                 " of " + std::to_string(V) + ")");
        double mu_in = A / B;
        double mu_out = (C - A) / (V - B);
        return A * (1 - 2 * mu_in) + mu_in * mu_in * B + (C - A) * (1 - 2 * mu_out) +
               mu_out * mu_out * (V - B);
    }

    // One descent attempt at step size dt.  Returns sign-flip count; fills the
    // undo log so the caller can reject.
    long long attempt(double dt, std::vector<std::pair<std::size_t, float>>& undo) {
        const double V = static_cast<double>(phi.size());
        double mu_in = sum_hb / sum_h;
        double mu_out = (total_b - sum_hb) / (V - sum_h);
        undo.clear();
        long long flips = 0;
        double d_sum_h = 0.0, d_sum_hb = 0.0;
        for (auto v : band) {
            double d = delta_eps(phi[v], eps);
            if (d == 0.0) continue;
            double b = beta.occupancy[v];
            double force = (b - mu_in) * (b - mu_in) - (b - mu_out) * (b - mu_out);
            double dphi = dt * d * force;
            if (dphi == 0.0) continue;
            float oldv = phi[v];
            float newv = static_cast<float>(oldv + dphi);
            undo.emplace_back(v, oldv);
            phi[v] = newv;
            double dh = heaviside(newv, eps) - heaviside(oldv, eps);
            d_sum_h += dh;
            d_sum_hb += dh * b;
            if ((oldv < 0) != (newv < 0)) {
                ++flips;
                neg_count += (newv < 0) ? 1 : -1;
            }
        }
        sum_h += d_sum_h;
        sum_hb += d_sum_hb;
        return flips;
    }

    void undo_step(const std::vector<std::pair<std::size_t, float>>& undo) {
        double d_sum_h = 0.0, d_sum_hb = 0.0;
        for (auto& [v, oldv] : undo) {
            float cur = phi[v];
            double dh = heaviside(oldv, eps) - heaviside(cur, eps);
            d_sum_h += dh;
            d_sum_hb += dh * beta.occupancy[v];
            if ((cur < 0) != (oldv < 0)) neg_count += (oldv < 0) ? 1 : -1;
            phi[v] = oldv;
        }
        sum_h += d_sum_h;
        sum_hb += d_sum_hb;
    }
};

// Interface voxels of a binary field (6-neighbor differs).
std::vector<Index3> boundary_voxels(const GridLayout& L, const std::vector<char>& inside) {
    std::vector<Index3> out;
    auto at = [&](int i, int j, int k) -> char {
        if (!L.contains(i, j, k)) return 0;
        return inside[L.index(i, j, k)];
    };
    for (int k = 0; k < L.dims[2]; ++k)
        for (int j = 0; j < L.dims[1]; ++j)
            for (int i = 0; i < L.dims[0]; ++i) {
                char me = at(i, j, k);
                if (!me) continue;
                if (!at(i - 1, j, k) || !at(i + 1, j, k) || !at(i, j - 1, k) ||
                    !at(i, j + 1, k) || !at(i, j, k - 1) || !at(i, j, k + 1))
                    out.push_back({i, j, k});
            }
    return out;
}

// Symmetric Hausdorff distance between two interface voxel sets, in voxels;
// capped search (returns > cap when exceeded).
double mask_hausdorff(const GridLayout& L, const std::vector<char>& a,
                      const std::vector<char>& b, double cap) {
    auto ba = boundary_voxels(L, a);
    auto bb = boundary_voxels(L, b);
    if (ba.empty() || bb.empty()) return cap + 1.0;
    std::vector<char> mark_b(L.size(), 0);
    for (auto& v : bb) mark_b[L.index(v[0], v[1], v[2])] = 1;
    std::vector<char> mark_a(L.size(), 0);
    for (auto& v : ba) mark_a[L.index(v[0], v[1], v[2])] = 1;

    const int r = static_cast<int>(std::ceil(cap));
    auto one_sided = [&](const std::vector<Index3>& from, const std::vector<char>& to) {
        double worst = 0.0;
        for (auto& v : from) {
            double best = cap + 1.0;
            for (int dk = -r; dk <= r && best > 0; ++dk)
                for (int dj = -r; dj <= r; ++dj)
                    for (int di = -r; di <= r; ++di) {
                        int i = v[0] + di, j = v[1] + dj, k = v[2] + dk;
                        if (!L.contains(i, j, k) || !to[L.index(i, j, k)]) continue;
                        double d = std::sqrt(double(di) * di + double(dj) * dj + double(dk) * dk);
                        if (d < best) best = d;
                    }
            if (best > worst) worst = best;
            if (worst > cap) return worst;
        }
        return worst;
    };
    return std::max(one_sided(ba, mark_b), one_sided(bb, mark_a));
}

std::vector<float> seed_level_set(const BinaryVolume& beta, const ScalarGrid* sdf_hint) {
    ScalarGrid own;
    const ScalarGrid* sdf = sdf_hint;
    if (!sdf) {
        own = signed_distance(beta);
        sdf = &own;
    }
    const auto& L = beta.layout;
    double best = std::numeric_limits<double>::max();
    for (double v : sdf->values) best = std::min(best, v);
    double depth_vox = -best / L.spacing;
    if (depth_vox < 2.0)
        throw DegenerateGeometry("object is thinner than ~2 voxels at this spacing");
    double r0 = std::clamp(0.3 * depth_vox, 2.0, depth_vox - 1.0);

    // Deep interiors are plateaus of near-equal depth; seed at the voxel of
    // the plateau closest to its centroid so the front grows isotropically.
    double ci = 0, cj = 0, ck = 0;
    long long count = 0;
    for (int k = 0; k < L.dims[2]; ++k)
        for (int j = 0; j < L.dims[1]; ++j)
            for (int i = 0; i < L.dims[0]; ++i)
                if (sdf->values[L.index(i, j, k)] <= best + 0.5 * L.spacing) {
                    ci += i;
                    cj += j;
                    ck += k;
                    ++count;
                }
    ci /= count;
    cj /= count;
    ck /= count;
    int si = 0, sj = 0, sk = 0;
    double best_d = std::numeric_limits<double>::max();
    for (int k = 0; k < L.dims[2]; ++k)
        for (int j = 0; j < L.dims[1]; ++j)
            for (int i = 0; i < L.dims[0]; ++i) {
                if (sdf->values[L.index(i, j, k)] > best + 0.5 * L.spacing) continue;
                double d = (i - ci) * (i - ci) + (j - cj) * (j - cj) + (k - ck) * (k - ck);
                if (d < best_d) {
                    best_d = d;
                    si = i;
                    sj = j;
                    sk = k;
                }
            }
    std::vector<float> phi(L.size());
    for (int k = 0; k < L.dims[2]; ++k)
        for (int j = 0; j < L.dims[1]; ++j)
            for (int i = 0; i < L.dims[0]; ++i) {
                double d = std::sqrt(double(i - si) * (i - si) + double(j - sj) * (j - sj) +
                                     double(k - sk) * (k - sk));
                phi[L.index(i, j, k)] = static_cast<float>(d - r0);
            }
    return phi;
}

// Shared driver: runs the evolution; optionally captures phi right after the
// steps listed in `capture_steps` (ascending).  The trajectory is identical
// between runs because reinitialization stays on its fixed schedule and
// captures copy the state.
struct RunResult {
    int converged_step = 0;
    std::vector<double> energy;
    std::vector<long long> volume;
    std::vector<std::vector<float>> captures;
};

RunResult run_evolution(Engine& eng, int max_steps, const std::vector<int>& capture_steps) {
    RunResult res;
    const int reinit_every = 20;
    // The front only advances when reinitialization refreshes the band, so a
    // no-flip streak must span a full reinit cycle before it means anything.
    const int stationary_needed = reinit_every + 5;
    double dt = eng.dt0;
    int accepts_in_row = 0;
    int stationary_accepted = 0;
    int no_reduce_streak = 0;
    int last_flip_step = 0;
    std::size_t capture_at = 0;
    std::vector<std::pair<std::size_t, float>> undo;

    reinit_band(eng.phi, eng.L, eng.eps + 2.0);
    eng.recompute_sums();
    eng.rebuild_band();
    double e_prev = eng.energy();
    // Reinitialization re-parameterizes the Heaviside ramp and so shifts the
    // raw energy; the recorded history nets those shifts out and tracks the
    // accumulated descent, which is monotone by construction.
    double reinit_offset = 0.0;

    int step = 1;
    for (; step <= max_steps; ++step) {
        if (step > 1 && (step - 1) % reinit_every == 0) {
            reinit_band(eng.phi, eng.L, eng.eps + 2.0);
            eng.recompute_sums();
            eng.rebuild_band();
            double e_post = eng.energy();
            reinit_offset += e_post - e_prev;
            e_prev = e_post;
        }

        long long flips = eng.attempt(dt, undo);
        double e_new = eng.energy();
        bool accept = e_new <= e_prev + 1e-12 * std::abs(e_prev);
        if (accept) {
            if (e_new < e_prev - 1e-12 * std::abs(e_prev))
                no_reduce_streak = 0;
            else
                ++no_reduce_streak;
            e_prev = e_new;
            if (++accepts_in_row >= 5) {
                dt = std::min(dt * 1.25, eng.dt0);
                accepts_in_row = 0;
            }
            if (flips > 0) {
                stationary_accepted = 0;
                last_flip_step = step;
            } else {
                ++stationary_accepted;
            }
        } else {
            eng.undo_step(undo);
            dt = std::max(dt * 0.5, eng.dt0 / 64.0);
            accepts_in_row = 0;
            ++no_reduce_streak;
        }
        res.energy.push_back(e_prev - reinit_offset);
        res.volume.push_back(eng.neg_count);

        while (capture_at < capture_steps.size() && capture_steps[capture_at] == step) {
            res.captures.push_back(eng.phi);
            ++capture_at;
        }

        if (stationary_accepted >= stationary_needed) break;
        if (no_reduce_streak >= 50)
            throw NoConvergence("energy not reduced for 50 consecutive steps at step " +
                                std::to_string(step));
    }
    if (stationary_accepted < stationary_needed)
        throw NoConvergence("interface still moving after " + std::to_string(max_steps) +
                            " steps");
    res.converged_step = std::max(1, last_flip_step);

    // Late captures (between convergence and the requested step) see the
    // converged state.
    while (capture_at < capture_steps.size()) {
        res.captures.push_back(eng.phi);
        ++capture_at;
    }
    return res;
}

}  // namespace

EvolutionTrace evolve_chan_vese(const BinaryVolume& beta, int max_steps, double eps, double dt,
                                const ScalarGrid* sdf_hint) {
    if (eps <= 0 || dt <= 0) throw ConfigError("gac eps and dt must be positive");
    EvolutionTrace trace;
    trace.beta_ = std::make_shared<BinaryVolume>(beta);
    trace.eps_ = eps;
    trace.dt_ = dt;
    trace.max_steps_ = max_steps;
    trace.phi0_ = seed_level_set(beta, sdf_hint);

    Engine eng(*trace.beta_, eps, dt, trace.phi0_);
    RunResult res = run_evolution(eng, max_steps, {});
    trace.steps_to_convergence_ = res.converged_step;
    trace.energy_history_ = std::move(res.energy);
    trace.volume_history_ = std::move(res.volume);

    // The converged zero-level set must match the occupancy boundary.
    std::vector<char> inside(eng.phi.size());
    for (std::size_t v = 0; v < eng.phi.size(); ++v) inside[v] = eng.phi[v] < 0 ? 1 : 0;
    std::vector<char> occ(beta.occupancy.begin(), beta.occupancy.end());
    double hd = mask_hausdorff(beta.layout, inside, occ, 1.0);
    if (hd > 1.0 + 1e-9)
        throw NoConvergence("converged interface misses the object boundary (Hausdorff " +
                            std::to_string(hd) + " voxels)");
    return trace;
}

std::vector<ScalarGrid> EvolutionTrace::snapshots_at(const std::vector<int>& steps) const {
    std::vector<int> sorted = steps;
    std::sort(sorted.begin(), sorted.end());

    // Replay with the original step budget so the trajectory (and its
    // convergence break) matches the first run bit for bit.
    Engine eng(*beta_, eps_, dt_, phi0_);
    RunResult res = run_evolution(eng, max_steps_, sorted);

    // Reinitialize each capture (on the copy) for signed-distance quality and
    // convert to model units.
    std::vector<ScalarGrid> out;
    const double h = beta_->layout.spacing;
    for (std::size_t s = 0; s < sorted.size(); ++s) {
        reinit_band(res.captures[s], beta_->layout, 6.0);
        ScalarGrid g;
        g.layout = beta_->layout;
        g.values.resize(res.captures[s].size());
        for (std::size_t v = 0; v < g.values.size(); ++v)
            g.values[v] = static_cast<double>(res.captures[s][v]) * h;
        out.push_back(std::move(g));
    }

    // Restore the caller's ordering.
    std::vector<ScalarGrid> reordered(steps.size());
    std::vector<char> used(sorted.size(), 0);
    for (std::size_t i = 0; i < steps.size(); ++i) {
        for (std::size_t j = 0; j < sorted.size(); ++j) {
            if (!used[j] && sorted[j] == steps[i]) {
                reordered[i] = std::move(out[j]);
                used[j] = 1;
                break;
            }
        }
    }
    return reordered;
}

ScalarGrid EvolutionTrace::snapshot_at(int step) const {
    return snapshots_at({step})[0];
}

}  // namespace hexcube
