#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "casimir3/errors.hpp"

namespace casimir3::detail {

// Rethrows the pending exception with `prefix` prepended, keeping its category.
[[noreturn]] inline void rethrow_annotated(const std::exception_ptr& error,
                                           const std::string& prefix) {
  try {
    std::rethrow_exception(error);
  } catch (const ContactError& e) {
    throw ContactError(prefix + e.what(), e.time());
  } catch (const InstabilityError& e) {
    throw InstabilityError(prefix + e.what(), e.time());
  } catch (const SteadyStateError& e) {
    throw SteadyStateError(prefix + e.what());
  } catch (const NumericalError& e) {
    throw NumericalError(prefix + e.what());
  } catch (const ConfigError& e) {
    throw ConfigError(prefix + e.what());
  } catch (const PreconditionError& e) {
    throw PreconditionError(prefix + e.what());
  } catch (const RangeError& e) {
    throw RangeError(prefix + e.what());
  } catch (const DomainError& e) {
    throw DomainError(prefix + e.what());
  } catch (const FitError& e) {
    throw FitError(prefix + e.what());
  } catch (const Error& e) {
    throw Error(prefix + e.what());
  }
}

// Calls row(i) for every i < values.size() on up to `threads` workers. The
// first failing row (in sweep order) is rethrown tagged with its value.
template <class Row>
void run_rows(const std::vector<double>& values, int threads, Row&& row) {
  std::vector<std::exception_ptr> errors(values.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < values.size(); i = next++) {
      try {
        row(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int workers = std::max(1, std::min<int>(threads, static_cast<int>(values.size())));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  for (std::size_t i = 0; i < errors.size(); ++i)
    if (errors[i]) {
      std::ostringstream os;
      os.precision(10);
      os << "sweep value " << values[i] << ": ";
      rethrow_annotated(errors[i], os.str());
    }
}

}  // namespace casimir3::detail
