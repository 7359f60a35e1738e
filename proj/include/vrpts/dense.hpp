#pragma once

#include <condition_variable>
#include <cstdint>
#include <functional>
#include <mutex>
#include <span>
#include <thread>
#include <vector>

#include "vrpts/attrcalc.hpp"

namespace vrpts {

// Struct-of-arrays storage for SubseqAttr records: one contiguous column per
// field so elementwise kernels stream through memory.
struct AttrColumns {
    std::vector<double> dist, load_in, load_out, load_max, duration, earliest, latest, warp;
    std::vector<int> first, last;

    std::size_t size() const { return dist.size(); }
    void resize(std::size_t n);
    std::size_t bytes() const { return size() * (8 * sizeof(double) + 2 * sizeof(int)); }

    SubseqAttr get(std::size_t i) const {
        return SubseqAttr{dist[i],     load_in[i],  load_out[i], load_max[i], duration[i],
                          earliest[i], latest[i],   warp[i],     first[i],    last[i]};
    }
    void set(std::size_t i, const SubseqAttr& a) {
        dist[i] = a.dist;
        load_in[i] = a.load_in;
        load_out[i] = a.load_out;
        load_max[i] = a.load_max;
        duration[i] = a.duration;
        earliest[i] = a.earliest;
        latest[i] = a.latest;
        warp[i] = a.warp;
        first[i] = a.first;
        last[i] = a.last;
    }
    // Record used for padding: never valid, never NaN.
    void set_padding(std::size_t i) { set(i, SubseqAttr{kInfinity, 0, 0, 0, 0, 0, kInfinity, 0, 0, 0}); }
};

// out[i] = src[idx[i]] for every column.
void gather(const AttrColumns& src, std::span<const std::int64_t> idx, AttrColumns& out);

// Running minimum with the smallest index winning ties.
struct ArgMin {
    double score = kInfinity;
    std::int64_t index = -1;

    void offer(double s, std::int64_t i) {
        if (s < score || (s == score && index >= 0 && i < index)) {
            score = s;
            index = i;
        }
    }
    void merge(const ArgMin& o) {
        if (o.index >= 0) offer(o.score, o.index);
    }
    bool found() const { return index >= 0; }
};

// Lowest finite entry below kInfinity of scores[0..n), offset by `base`.
ArgMin argmin(std::span<const double> scores, std::int64_t base);

// Fixed-size worker pool. run() executes task(t) for t in [0, n) and
// returns when all are done; callers store per-task results by index, so
// the outcome never depends on scheduling.
class Executor {
public:
    explicit Executor(int threads = 1);
    ~Executor();
    Executor(const Executor&) = delete;
    Executor& operator=(const Executor&) = delete;

    int threads() const { return threads_; }
    void run(std::int64_t n, const std::function<void(std::int64_t)>& task);

private:
    void worker();

    int threads_;
    std::vector<std::thread> pool_;
    std::mutex mu_;
    std::condition_variable cv_, done_cv_;
    const std::function<void(std::int64_t)>* task_ = nullptr;
    std::int64_t next_ = 0, total_ = 0, finished_ = 0;
    std::uint64_t generation_ = 0;
    bool stop_ = false;
};

}  // namespace vrpts
