#ifndef TPNSI_PARALLEL_HPP
#define TPNSI_PARALLEL_HPP

#include <cstddef>
#include <functional>

namespace tpnsi {

/**
 * @brief Number of worker threads used for grid-style parallel loops.
 *
 * Defaults to the hardware concurrency, capped by the TPNSI_THREADS
 * environment variable when it is set to a positive integer.
 */
std::size_t worker_thread_count();

/**
 * @brief Runs body(i) for i in [0, n) on a static partition of worker threads.
 *
 * Each index writes only to its own output slot, so results are
 * bit-for-bit independent of the number of threads. Exceptions thrown by the
 * body are captured and the first one (lowest index) is rethrown on the
 * calling thread.
 */
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace tpnsi

#endif  // TPNSI_PARALLEL_HPP
