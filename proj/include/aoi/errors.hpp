#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace aoi {

// Base for everything thrown by the library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ValidationError : Error {
    ValidationError(const std::string& field, const std::string& constraint)
        : Error("validation failed: " + field + ": " + constraint),
          field(field), constraint(constraint) {}
    std::string field;
    std::string constraint;
};

struct ParseError : Error {
    ParseError(const std::string& where, std::size_t line, const std::string& what)
        : Error("parse error: " + where + ":" + std::to_string(line) + ": " + what),
          where(where), line(line) {}
    std::string where;
    std::size_t line;
};

struct IoError : Error {
    explicit IoError(const std::string& what) : Error("io error: " + what) {}
};

struct IndexOutOfRange : Error {
    IndexOutOfRange(const std::string& what, std::size_t index)
        : Error("index out of range: " + what + " (" + std::to_string(index) + ")"),
          index(index) {}
    std::size_t index;
};

struct EmptyUavSet : Error {
    EmptyUavSet() : Error("association requires at least one UAV") {}
};

struct NoAssociatedNodes : Error {
    explicit NoAssociatedNodes(std::size_t uav)
        : Error("UAV " + std::to_string(uav) +
                " has no associated nodes; scheduling probability undefined"),
          uav(uav) {}
    std::size_t uav;
};

struct UnassociatedSource : Error {
    explicit UnassociatedSource(std::size_t source)
        : Error("source node " + std::to_string(source) + " has no assigned UAV"),
          source(source) {}
    std::size_t source;
};

struct DegenerateChannel : Error {
    DegenerateChannel()
        : Error("SINR undefined: zero noise and no interferers") {}
};

struct NotExponential : Error {
    explicit NotExponential(double scv)
        : Error("operation requires exponential service (scv = 1), got scv = " +
                std::to_string(scv)) {}
};

struct PoleAt : Error {
    explicit PoleAt(double s)
        : Error("expression has a pole at s = " + std::to_string(s)), s(s) {}
    double s;
};

struct Unstable : Error {
    explicit Unstable(std::size_t node)
        : Error("chain unstable at node " + std::to_string(node)), node(node) {}
    std::size_t node;
};

struct ZeroSuccessProbability : Error {
    ZeroSuccessProbability()
        : Error("end-to-end success probability is zero") {}
};

struct InsufficientDeliveries : Error {
    InsufficientDeliveries(std::size_t have, std::size_t need)
        : Error("trace has " + std::to_string(have) + " deliveries, need >= " +
                std::to_string(need)),
          have(have), need(need) {}
    std::size_t have;
    std::size_t need;
};

}  // namespace aoi
