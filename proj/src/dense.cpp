#include "vrpts/dense.hpp"

namespace vrpts {

void AttrColumns::resize(std::size_t n) {
    for (auto* v : {&dist, &load_in, &load_out, &load_max, &duration, &earliest, &latest, &warp}) v->resize(n);
    first.resize(n);
    last.resize(n);
}

void gather(const AttrColumns& src, std::span<const std::int64_t> idx, AttrColumns& out) {
    out.resize(idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i) out.set(i, src.get(static_cast<std::size_t>(idx[i])));
}

ArgMin argmin(std::span<const double> scores, std::int64_t base) {
    ArgMin best;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (scores[i] < best.score) {
            best.score = scores[i];
            best.index = base + static_cast<std::int64_t>(i);
        }
    }
    return best;
}

Executor::Executor(int threads) : threads_(threads < 1 ? 1 : threads) {
    for (int t = 1; t < threads_; ++t) pool_.emplace_back([this] { worker(); });
}

Executor::~Executor() {
    {
        std::lock_guard lock(mu_);
        stop_ = true;
    }
    cv_.notify_all();
    for (auto& t : pool_) t.join();
}

void Executor::run(std::int64_t n, const std::function<void(std::int64_t)>& task) {
    if (n <= 0) return;
    if (pool_.empty()) {
        for (std::int64_t t = 0; t < n; ++t) task(t);
        return;
    }
    {
        std::lock_guard lock(mu_);
        task_ = &task;
        next_ = 0;
        total_ = n;
        finished_ = 0;
        ++generation_;
    }
    cv_.notify_all();
    // The calling thread works too.
    for (;;) {
        std::int64_t t;
        {
            std::lock_guard lock(mu_);
            if (next_ >= total_) break;
            t = next_++;
        }
        task(t);
        std::lock_guard lock(mu_);
        if (++finished_ == total_) done_cv_.notify_all();
    }
    std::unique_lock lock(mu_);
    done_cv_.wait(lock, [&] { return finished_ == total_; });
    task_ = nullptr;
}

void Executor::worker() {
    std::uint64_t seen = 0;
    for (;;) {
        std::unique_lock lock(mu_);
        cv_.wait(lock, [&] { return stop_ || (generation_ != seen && next_ < total_); });
        if (stop_) return;
        seen = generation_;
        while (next_ < total_) {
            const std::int64_t t = next_++;
            const auto* task = task_;
            lock.unlock();
            (*task)(t);
            lock.lock();
            if (++finished_ == total_) done_cv_.notify_all();
        }
    }
}

}  // namespace vrpts
