#pragma once

// Monte Carlo sweep of the consensus radius bound over random regular graphs,
// with per-record and per-cell CSV output and an optional SVG chart.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <locale>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "lsb/errors.hpp"
#include "lsb/io.hpp"
#include "lsb/regular_graph.hpp"

namespace lsb {

struct SweepConfig {
    std::vector<int> n_values;
    std::vector<int> k_values;
    double d = 1.0;
    int graphs_per_cell = 100;
    std::uint64_t seed = 0;
};

struct SweepAggregate {
    int n = 0;
    int k = 0;
    int count = 0;
    double mean_r_par = 0.0;
    double std_r_par = 0.0;  // population standard deviation
};

struct SweepResult {
    std::vector<SweepRecord> records;  // sorted by (n, k, index)
    std::vector<SweepAggregate> aggregates;
    std::vector<std::string> skipped;
};

/// Seed of graph `index` in cell (n, k): seed_base + splitmix64(n, k, index).
inline std::uint64_t cell_seed(std::uint64_t base, int n, int k, int index) {
    std::uint64_t z = (static_cast<std::uint64_t>(n) << 42) ^ (static_cast<std::uint64_t>(k) << 21) ^
                      static_cast<std::uint64_t>(index);
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    z ^= z >> 31;
    return base + z;
}

/// Worker count: LSB_THREADS if set and positive, else hardware concurrency.
inline unsigned worker_count() {
    unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("LSB_THREADS")) {
        char* end = nullptr;
        long v = std::strtol(env, &end, 10);
        if (end != env && v > 0) return static_cast<unsigned>(v);
    }
    return hw;
}

/// Runs fn(i) for i in [0, count) on a small pool; fn writes only its own slot.
template <class Fn>
void parallel_for(std::size_t count, Fn&& fn) {
    const unsigned threads = static_cast<unsigned>(std::min<std::size_t>(worker_count(), count));
    if (threads <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::atomic<bool> failed{false};
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (std::size_t i; (i = next.fetch_add(1)) < count && !failed;) {
                try {
                    fn(i);
                } catch (...) {
                    if (!failed.exchange(true)) failure = std::current_exception();
                }
            }
        });
    }
    pool.clear();
    if (failure) std::rethrow_exception(failure);
}

inline std::vector<SweepAggregate> aggregate_records(const std::vector<SweepRecord>& records) {
    std::map<std::pair<int, int>, std::vector<double>> cells;
    for (const auto& r : records) cells[{r.n, r.k}].push_back(r.r_par_bound);
    std::vector<SweepAggregate> out;
    for (const auto& [key, vals] : cells) {
        SweepAggregate a;
        a.n = key.first;
        a.k = key.second;
        a.count = static_cast<int>(vals.size());
        // shifted by the first value, so identical samples give exactly zero spread
        const double shift = vals.front();
        double sum = 0.0;
        for (double v : vals) sum += v - shift;
        const double mean_dev = sum / a.count;
        a.mean_r_par = shift + mean_dev;
        double ss = 0.0;
        for (double v : vals) ss += (v - shift - mean_dev) * (v - shift - mean_dev);
        a.std_r_par = std::sqrt(ss / a.count);
        out.push_back(a);
    }
    return out;
}

inline SweepResult run_sweep(const SweepConfig& cfg) {
    detail::require(cfg.d > 0.0, "sweep: d must be positive");
    detail::require(cfg.graphs_per_cell > 0, "sweep: graphs_per_cell must be positive");
    detail::require(!cfg.n_values.empty() && !cfg.k_values.empty(), "sweep: n_values and k_values must be non-empty");

    struct Job {
        int n, k, index;
    };
    SweepResult res;
    std::vector<Job> jobs;
    std::vector<int> ns = cfg.n_values, ks = cfg.k_values;
    std::sort(ns.begin(), ns.end());
    ns.erase(std::unique(ns.begin(), ns.end()), ns.end());
    std::sort(ks.begin(), ks.end());
    ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
    for (int n : ns) {
        for (int k : ks) {
            std::string cell = "(n=" + std::to_string(n) + ", k=" + std::to_string(k) + ")";
            if (k <= 0 || k >= n) {
                res.skipped.push_back(cell + ": need 0 < k < n");
                continue;
            }
            if ((static_cast<long long>(n) * k) % 2 != 0) {
                res.skipped.push_back(cell + ": n*k is odd");
                continue;
            }
            for (int i = 0; i < cfg.graphs_per_cell; ++i) jobs.push_back({n, k, i});
        }
    }
    res.records.resize(jobs.size());
    parallel_for(jobs.size(), [&](std::size_t j) {
        const Job& job = jobs[j];
        std::uint64_t s = cell_seed(cfg.seed, job.n, job.k, job.index);
        GeneratedGraph g = generate_random_regular(job.n, job.k, s);
        res.records[j] = make_sweep_record(g.graph, cfg.d, s, job.index);
    });
    res.aggregates = aggregate_records(res.records);
    return res;
}

inline std::string records_csv(const std::vector<SweepRecord>& records) {
    std::ostringstream os;
    os.imbue(std::locale::classic());
    os << "n,k,d,seed,index,lambda2,lambda_min,lambda_prime,r_par_bound\n";
    for (const auto& r : records) {
        os << r.n << ',' << r.k << ',' << fmt_double(r.d) << ',' << r.seed << ',' << r.index << ','
           << fmt_double(r.lambda2) << ',' << fmt_double(r.lambda_min) << ',' << fmt_double(r.lambda_prime) << ','
           << fmt_double(r.r_par_bound) << '\n';
    }
    return os.str();
}

inline std::string aggregates_csv(const std::vector<SweepAggregate>& aggs) {
    std::ostringstream os;
    os.imbue(std::locale::classic());
    os << "n,k,count,mean_r_par,std_r_par\n";
    for (const auto& a : aggs) {
        os << a.n << ',' << a.k << ',' << a.count << ',' << fmt_double(a.mean_r_par) << ','
           << fmt_double(a.std_r_par) << '\n';
    }
    return os.str();
}

namespace detail {

/// One error-bar panel: series keyed by `series`, x positions from `x`.
inline void svg_panel(std::ostringstream& os, const std::vector<SweepAggregate>& aggs, bool series_is_k, double ox,
                      double oy, double w, double h, double ymax, const std::string& title) {
    static const char* colors[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2"};
    std::map<int, std::vector<const SweepAggregate*>> series;
    int xmin = 1 << 30, xmax = 0;
    for (const auto& a : aggs) {
        int key = series_is_k ? a.k : a.n;
        int x = series_is_k ? a.n : a.k;
        series[key].push_back(&a);
        xmin = std::min(xmin, x);
        xmax = std::max(xmax, x);
    }
    if (xmax == xmin) {
        xmin -= 1;
        xmax += 1;
    }
    auto px = [&](double x) { return ox + 50 + (x - xmin) / (xmax - xmin) * (w - 70); };
    auto py = [&](double y) { return oy + h - 40 - y / ymax * (h - 70); };
    os << "<text x='" << ox + w / 2 << "' y='" << oy + 18 << "' text-anchor='middle' font-size='14'>" << title
       << "</text>\n";
    os << "<line x1='" << px(xmin) << "' y1='" << py(0) << "' x2='" << px(xmax) << "' y2='" << py(0)
       << "' stroke='black'/>\n";
    os << "<line x1='" << px(xmin) << "' y1='" << py(0) << "' x2='" << px(xmin) << "' y2='" << py(ymax)
       << "' stroke='black'/>\n";
    for (int t = 0; t <= 4; ++t) {
        double y = ymax * t / 4.0;
        os << "<text x='" << px(xmin) - 6 << "' y='" << py(y) + 4 << "' text-anchor='end' font-size='10'>"
           << fmt_double(std::round(y * 1000) / 1000) << "</text>\n";
    }
    os << "<text x='" << ox + w / 2 << "' y='" << oy + h - 8 << "' text-anchor='middle' font-size='12'>"
       << (series_is_k ? "n" : "k") << "</text>\n";
    int ci = 0, li = 0;
    for (const auto& [key, pts] : series) {
        const char* col = colors[ci++ % 7];
        std::vector<const SweepAggregate*> sorted = pts;
        std::sort(sorted.begin(), sorted.end(), [&](auto* a, auto* b) {
            return (series_is_k ? a->n : a->k) < (series_is_k ? b->n : b->k);
        });
        os << "<polyline fill='none' stroke='" << col << "' points='";
        for (auto* a : sorted) os << px(series_is_k ? a->n : a->k) << ',' << py(a->mean_r_par) << ' ';
        os << "'/>\n";
        for (auto* a : sorted) {
            double x = px(series_is_k ? a->n : a->k);
            os << "<line x1='" << x << "' y1='" << py(std::max(0.0, a->mean_r_par - a->std_r_par)) << "' x2='" << x
               << "' y2='" << py(a->mean_r_par + a->std_r_par) << "' stroke='" << col << "'/>\n";
            os << "<circle cx='" << x << "' cy='" << py(a->mean_r_par) << "' r='3' fill='" << col << "'/>\n";
        }
        os << "<text x='" << ox + w - 15 << "' y='" << oy + 36 + 14 * li++ << "' text-anchor='end' font-size='11' fill='"
           << col << "'>" << (series_is_k ? "k=" : "n=") << key << "</text>\n";
    }
}

}  // namespace detail

/// Two panels: bound vs n at fixed k, and bound vs k at fixed n (mean +/- std).
inline std::string sweep_svg(const std::vector<SweepAggregate>& aggs) {
    std::ostringstream os;
    os.imbue(std::locale::classic());
    const double w = 420, h = 320;
    double ymax = 0.0;
    for (const auto& a : aggs) ymax = std::max(ymax, a.mean_r_par + a.std_r_par);
    if (ymax <= 0.0) ymax = 1.0;
    ymax *= 1.1;
    os << "<svg xmlns='http://www.w3.org/2000/svg' width='" << 2 * w << "' height='" << h << "'>\n";
    os << "<rect width='100%' height='100%' fill='white'/>\n";
    detail::svg_panel(os, aggs, true, 0, 0, w, h, ymax, "(a) R_par bound vs n, fixed k");
    detail::svg_panel(os, aggs, false, w, 0, w, h, ymax, "(b) R_par bound vs k, fixed n");
    os << "</svg>\n";
    return os.str();
}

}  // namespace lsb
