#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace medbounds {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidDistribution : public Error {
public:
    using Error::Error;
};

class EmptyArm : public Error {
public:
    explicit EmptyArm(int arm)
        : Error("arm A=" + std::to_string(arm) + " has zero total count"), arm_(arm) {}
    int arm() const noexcept { return arm_; }

private:
    int arm_;
};

/// A conditional probability needed by a formula has a zero-probability conditioning event.
class UndefinedConditional : public Error {
public:
    using Error::Error;
};

class EmptyIntersection : public Error {
public:
    using Error::Error;
};

class Infeasible : public Error {
public:
    using Error::Error;
};

class Unbounded : public Error {
public:
    using Error::Error;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

class UnsupportedEstimand : public Error {
public:
    using Error::Error;
};

class SymbolMismatch : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    using Error::Error;
};

/// Vertex enumeration ran past its node budget. Carries how far it got.
class ResourceExhausted : public Error {
public:
    ResourceExhausted(const std::string& what, std::size_t rows_done, std::size_t rows_total,
                      std::uint64_t nodes, std::size_t live_rays)
        : Error(what),
          rows_done_(rows_done),
          rows_total_(rows_total),
          nodes_(nodes),
          live_rays_(live_rays) {}

    std::size_t rows_done() const noexcept { return rows_done_; }
    std::size_t rows_total() const noexcept { return rows_total_; }
    std::uint64_t nodes() const noexcept { return nodes_; }
    std::size_t live_rays() const noexcept { return live_rays_; }

private:
    std::size_t rows_done_;
    std::size_t rows_total_;
    std::uint64_t nodes_;
    std::size_t live_rays_;
};

}  // namespace medbounds
