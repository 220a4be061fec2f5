#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <functional>
#include <mutex>
#include <stdexcept>
#include <thread>
#include <vector>

#include "gmg/grid.hpp"

namespace gmg {

/// Thrown when a kernel is launched on an engine while one of its input
/// fields is resident in the other memory space.
struct OperandNotResident : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Byte-accounted traffic across the host/device-space boundary.
struct TransferStats {
    std::uint64_t bytes = 0;   // explicit copies, 8 bytes per value
    int copies = 0;            // copies that moved residency with data
    int noop_copies = 0;       // requested copies that were already resident
    int claims = 0;            // residency taken by a pure overwrite, no data moved
    double seconds = 0.0;      // wall time of the communication phase
};

/// Fixed balanced-binary-tree sum. Both engines reduce through this exact
/// tree, which makes norms bitwise reproducible for any worker count.
inline double pairwise_sum(const double* x, index_t n) {
    if (n == 0) return 0.0;
    if (n == 1) return x[0];
    const index_t half = n / 2;
    return pairwise_sum(x, half) + pairwise_sum(x + half, n - half);
}

/// An execution engine over independent per-task work items. Tasks within
/// one launch must be mutually independent; launches are blocking.
class Engine {
public:
    Engine(Space space, int workers) : space_(space), workers_(workers) {}
    virtual ~Engine() = default;

    Space space() const { return space_; }
    int workers() const { return workers_; }

    virtual void run(index_t tasks, const std::function<void(index_t)>& fn) = 0;

    /// Deterministic reduction: leaf values are combined through the fixed
    /// pairwise tree regardless of how leaf evaluation is scheduled.
    double tree_sum(index_t leaves, const std::function<double(index_t)>& leaf) {
        std::vector<double> vals(static_cast<std::size_t>(leaves));
        run(leaves, [&](index_t t) { vals[static_cast<std::size_t>(t)] = leaf(t); });
        return pairwise_sum(vals.data(), leaves);
    }

private:
    Space space_;
    int workers_;
};

/// Host engine: visits tasks in order on the calling thread.
class SerialEngine final : public Engine {
public:
    explicit SerialEngine(Space space = Space::host) : Engine(space, 1) {}

    void run(index_t tasks, const std::function<void(index_t)>& fn) override {
        for (index_t t = 0; t < tasks; ++t) fn(t);
    }
};

/// Accelerator engine: a persistent worker pool that partitions each launch
/// into chunks claimed dynamically. Tasks are independent, so the chunking
/// cannot change results.
class PoolEngine final : public Engine {
public:
    explicit PoolEngine(Space space, int workers)
        : Engine(space, workers < 1 ? 1 : workers) {
        const int w = this->workers();
        threads_.reserve(static_cast<std::size_t>(w));
        for (int i = 0; i < w; ++i)
            threads_.emplace_back([this] { worker_loop(); });
    }

    ~PoolEngine() override {
        {
            std::lock_guard<std::mutex> lk(m_);
            stop_ = true;
        }
        wake_.notify_all();
        for (auto& t : threads_) t.join();
    }

    void run(index_t tasks, const std::function<void(index_t)>& fn) override {
        if (tasks <= 0) return;
        {
            std::lock_guard<std::mutex> lk(m_);
            job_ = &fn;
            tasks_ = tasks;
            chunk_ = std::max<index_t>(1, tasks / (static_cast<index_t>(workers()) * 4));
            next_.store(0, std::memory_order_relaxed);
            busy_ = workers();
            ++generation_;
        }
        wake_.notify_all();
        std::unique_lock<std::mutex> lk(m_);
        done_.wait(lk, [this] { return busy_ == 0; });
        job_ = nullptr;
    }

private:
    void worker_loop() {
        std::uint64_t seen = 0;
        for (;;) {
            const std::function<void(index_t)>* job;
            index_t tasks, chunk;
            {
                std::unique_lock<std::mutex> lk(m_);
                wake_.wait(lk, [&] { return stop_ || generation_ != seen; });
                if (stop_) return;
                seen = generation_;
                job = job_;
                tasks = tasks_;
                chunk = chunk_;
            }
            for (;;) {
                const index_t begin = next_.fetch_add(chunk, std::memory_order_relaxed);
                if (begin >= tasks) break;
                const index_t end = std::min(begin + chunk, tasks);
                for (index_t t = begin; t < end; ++t) (*job)(t);
            }
            {
                std::lock_guard<std::mutex> lk(m_);
                if (--busy_ == 0) done_.notify_all();
            }
        }
    }

    std::vector<std::thread> threads_;
    std::mutex m_;
    std::condition_variable wake_, done_;
    const std::function<void(index_t)>* job_ = nullptr;
    index_t tasks_ = 0;
    index_t chunk_ = 1;
    std::atomic<index_t> next_{0};
    int busy_ = 0;
    std::uint64_t generation_ = 0;
    bool stop_ = false;
};

template <int D>
void require_resident(const GridField<D>& field, const Engine& engine, const char* what) {
    if (field.space != engine.space())
        throw OperandNotResident(std::string(what) + " on level " +
                                 std::to_string(field.grid.level) + " is resident in the " +
                                 to_string(field.space) + " space but the kernel runs in the " +
                                 to_string(engine.space()) + " space");
}

/// A field that is fully overwritten by a kernel needs no data movement:
/// the writing engine takes residency directly.
template <int D>
void claim_output(GridField<D>& field, const Engine& engine, TransferStats* ts) {
    if (field.space != engine.space()) {
        field.space = engine.space();
        if (ts) ++ts->claims;
    }
}

/// Explicit copy of a field across the memory-space boundary.
/// Returns the bytes moved (8 per stored value); a copy into the space the
/// field already occupies is a no-op and is flagged in the stats.
template <int D>
std::uint64_t copy_across(GridField<D>& field, Space dest, TransferStats& ts) {
    if (field.space == dest) {
        ++ts.noop_copies;
        return 0;
    }
    const auto t0 = std::chrono::steady_clock::now();
    field.space = dest;
    const std::uint64_t bytes = 8ull * static_cast<std::uint64_t>(field.grid.total_points());
    ts.bytes += bytes;
    ++ts.copies;
    ts.seconds += std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return bytes;
}

} // namespace gmg
