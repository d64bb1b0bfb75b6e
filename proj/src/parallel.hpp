#pragma once

#include <condition_variable>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace cipherlab {

// Fork-join helper over contiguous index ranges. Each index is handled by
// exactly one worker, so per-element floating point reduction order never
// depends on the thread count: results are bit-identical for any setting
// of CIPHERLAB_THREADS.
class ThreadPool {
public:
    static ThreadPool& instance() {
        static ThreadPool pool(threads_from_env());
        return pool;
    }

    int threads() const { return static_cast<int>(workers_.size()) + 1; }

    // fn(begin, end) over [0,n) split into contiguous chunks.
    void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn) {
        const int nw = threads();
        if (nw <= 1 || n < 2) {
            fn(0, n);
            return;
        }
        std::size_t chunk = (n + nw - 1) / nw;
        {
            std::unique_lock<std::mutex> lock(mu_);
            job_ = &fn;
            job_n_ = n;
            job_chunk_ = chunk;
            pending_ = static_cast<int>(workers_.size());
            ++generation_;
        }
        cv_work_.notify_all();
        fn(0, std::min(chunk, n));
        std::unique_lock<std::mutex> lock(mu_);
        cv_done_.wait(lock, [&] { return pending_ == 0; });
        job_ = nullptr;
    }

    ~ThreadPool() {
        {
            std::unique_lock<std::mutex> lock(mu_);
            stop_ = true;
            ++generation_;
        }
        cv_work_.notify_all();
        for (auto& t : workers_) t.join();
    }

private:
    explicit ThreadPool(int nthreads) {
        for (int i = 1; i < nthreads; ++i)
            workers_.emplace_back([this, i] { worker_loop(i); });
    }

    static int threads_from_env() {
        const char* env = std::getenv("CIPHERLAB_THREADS");
        if (!env) return 1;
        int n = std::atoi(env);
        return n < 1 ? 1 : n;
    }

    void worker_loop(int id) {
        std::uint64_t seen = 0;
        for (;;) {
            const std::function<void(std::size_t, std::size_t)>* job = nullptr;
            std::size_t n = 0, chunk = 0, begin = 0;
            {
                std::unique_lock<std::mutex> lock(mu_);
                cv_work_.wait(lock, [&] { return generation_ != seen; });
                seen = generation_;
                if (stop_) return;
                job = job_;
                n = job_n_;
                chunk = job_chunk_;
                begin = chunk * static_cast<std::size_t>(id);
            }
            if (job && begin < n) (*job)(begin, std::min(begin + chunk, n));
            {
                std::unique_lock<std::mutex> lock(mu_);
                if (--pending_ == 0) cv_done_.notify_one();
            }
        }
    }

    std::vector<std::thread> workers_;
    std::mutex mu_;
    std::condition_variable cv_work_, cv_done_;
    const std::function<void(std::size_t, std::size_t)>* job_ = nullptr;
    std::size_t job_n_ = 0, job_chunk_ = 0;
    std::uint64_t generation_ = 0;
    int pending_ = 0;
    bool stop_ = false;
};

inline void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn) {
    ThreadPool::instance().parallel_for(n, fn);
}

} // namespace cipherlab
