#include "mc_oracle.hpp"

#include "errors.hpp"

#include <algorithm>
#include <atomic>
#include <cassert>
#include <cmath>
#include <random>
#include <thread>
#include <vector>

namespace nomasec {

namespace {

constexpr double kLog2E = 1.4426950408889634073599246810019;
constexpr std::uint64_t kChunk = 1u << 16;

std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Uniform in (0, 1], exactly reproducible across platforms.
double uniform_01(std::mt19937_64& eng)
{
    return static_cast<double>((eng() >> 11) + 1) * 0x1.0p-53;
}

struct ChunkAccumulator {
    double sum = 0.0;
    double sum_sq = 0.0;
};

struct PerSampleContext {
    const ChannelStats& stats;
    RateMode mode;
    double a_s;
    double sigma_eps2;
    double p_max;
    double i_peak;
    bool oma_noise;
};

ChunkAccumulator run_chunk(const PerSampleContext& ctx, std::uint64_t chunk_index,
                           std::uint64_t samples, std::uint64_t seed)
{
    std::mt19937_64 eng(splitmix64(seed ^ ((chunk_index + 1) * 0x9E3779B97F4A7C15ULL)));
    ChunkAccumulator acc;
    const auto& s = ctx.stats;
    for (std::uint64_t i = 0; i < samples; ++i) {
        GainSample g;
        g.g_near = -s.omega_t_near * std::log(uniform_01(eng));
        g.g_far = -s.omega_t_far * std::log(uniform_01(eng));
        g.g_eve = -s.omega_t_eve * std::log(uniform_01(eng));
        double gp = 0.0;
        for (double ot : s.omega_t_pr)
            gp = std::max(gp, -ot * std::log(uniform_01(eng)));
        g.g_pr_max = gp;
        const double power = transmit_power(gp, ctx.p_max, ctx.i_peak);
        const double r =
            instant_secrecy_rate(ctx.mode, g, power, ctx.a_s, ctx.sigma_eps2, ctx.oma_noise);
        acc.sum += r;
        acc.sum_sq += r * r;
    }
    return acc;
}

// Fixed-shape pairwise reduction over chunk order.
ChunkAccumulator reduce_pairwise(std::vector<ChunkAccumulator> v)
{
    if (v.empty())
        return {};
    while (v.size() > 1) {
        std::vector<ChunkAccumulator> next;
        next.reserve((v.size() + 1) / 2);
        for (std::size_t i = 0; i + 1 < v.size(); i += 2)
            next.push_back({v[i].sum + v[i + 1].sum, v[i].sum_sq + v[i + 1].sum_sq});
        if (v.size() % 2 == 1)
            next.push_back(v.back());
        v = std::move(next);
    }
    return v.front();
}

} // namespace

double transmit_power(double g_pr_max, double p_max, double i_peak)
{
    return std::min(p_max, i_peak / g_pr_max);
}

double instant_secrecy_rate(RateMode mode, const GainSample& g, double power, double a_s,
                            double sigma_eps2, bool oma_estimation_noise)
{
    const double g_s = std::max(g.g_near, g.g_far);
    const double g_w = std::min(g.g_near, g.g_far);
    assert(g_s >= g_w);
    double rate_nats = 0.0;
    switch (mode) {
    case RateMode::NomaStrong:
        rate_nats = std::log1p((sigma_eps2 + a_s * g_s) * power) -
                    std::log1p((sigma_eps2 + a_s * g.g_eve) * power);
        break;
    case RateMode::NomaWeak:
        rate_nats = std::log1p((g_w + sigma_eps2) * power) -
                    std::log1p((a_s * g_w + sigma_eps2) * power) -
                    std::log1p((g.g_eve + sigma_eps2) * power) +
                    std::log1p((a_s * g.g_eve + sigma_eps2) * power);
        break;
    case RateMode::OmaStrong:
    case RateMode::OmaWeak: {
        const double shift = oma_estimation_noise ? sigma_eps2 : 0.0;
        const double g_k = (mode == RateMode::OmaStrong ? g_s : g_w) + shift;
        const double g_e = g.g_eve + shift;
        rate_nats = 0.5 * (std::log1p(g_k * power) - std::log1p(g_e * power));
        break;
    }
    }
    return std::max(rate_nats, 0.0) * kLog2E;
}

McEstimate mc_esr(const SystemConfig& cfg, RateMode mode, std::uint64_t n, std::uint64_t seed,
                  const McOptions& options)
{
    if (n < 10000)
        throw ModelError("mc_esr: sample count must be >= 10^4 for a usable stderr");
    const ChannelStats stats = derive_stats(cfg);
    const PerSampleContext ctx{stats,     mode,        cfg.a_s,
                               cfg.sigma_eps2, cfg.p_max, cfg.i_peak,
                               options.oma_estimation_noise};

    const std::uint64_t chunks = (n + kChunk - 1) / kChunk;
    std::vector<ChunkAccumulator> partials(chunks);

    int threads = options.threads;
    if (threads <= 0)
        threads = static_cast<int>(std::min(16u, std::max(1u, std::thread::hardware_concurrency())));
    threads = static_cast<int>(std::min<std::uint64_t>(threads, chunks));

    auto worker_body = [&](std::atomic<std::uint64_t>& cursor) {
        for (;;) {
            const std::uint64_t c = cursor.fetch_add(1);
            if (c >= chunks)
                return;
            const std::uint64_t count = (c + 1 == chunks) ? n - c * kChunk : kChunk;
            partials[c] = run_chunk(ctx, c, count, seed);
        }
    };

    std::atomic<std::uint64_t> cursor{0};
    if (threads <= 1) {
        worker_body(cursor);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(threads);
        for (int t = 0; t < threads; ++t)
            pool.emplace_back([&] { worker_body(cursor); });
        for (auto& t : pool)
            t.join();
    }

    const ChunkAccumulator total = reduce_pairwise(std::move(partials));
    const double nd = static_cast<double>(n);
    const double mean = total.sum / nd;
    double std_err = 0.0;
    if (n > 1) {
        const double var = std::max(0.0, (total.sum_sq - total.sum * total.sum / nd) / (nd - 1.0));
        std_err = std::sqrt(var / nd);
    }
    return {mean, std_err, n};
}

} // namespace nomasec
