#pragma once

#include <chrono>
#include <stdexcept>
#include <string>

namespace gr1core {

// Base of every error raised by the library. The CLI maps any of these to
// exit status 1.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class SyntaxError : public Error {
public:
    SyntaxError(int line, const std::string& msg)
        : Error("line " + std::to_string(line) + ": " + msg), line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

class UndeclaredProposition : public SyntaxError {
public:
    UndeclaredProposition(const std::string& name, int line)
        : SyntaxError(line, "undeclared proposition '" + name + "'"), name_(name) {}
    const std::string& name() const { return name_; }

private:
    std::string name_;
};

class NextInInitOrGoal : public SyntaxError {
public:
    explicit NextInInitOrGoal(int line)
        : SyntaxError(line, "next() is not allowed in initial conditions or liveness goals") {}
};

class UndeclaredRegion : public Error {
public:
    explicit UndeclaredRegion(const std::string& name)
        : Error("region '" + name + "' is not a declared output proposition") {}
};

class UnknownStatementId : public Error {
public:
    explicit UnknownStatementId(int id) : Error("unknown statement id " + std::to_string(id)) {}
};

class UnknownGoal : public Error {
public:
    explicit UnknownGoal(int k) : Error("unknown system goal index " + std::to_string(k)) {}
};

class ResourceLimit : public Error {
public:
    using Error::Error;
};

class AnalysisTimeout : public Error {
public:
    explicit AnalysisTimeout(const std::string& phase)
        : Error("analysis budget exhausted during " + phase), phase_(phase) {}
    const std::string& phase() const { return phase_; }

private:
    std::string phase_;
};

class NotUnsat : public Error {
public:
    NotUnsat() : Error("instance is satisfiable; no unsatisfiable core exists") {}
};

class NotDeadlocked : public Error {
public:
    explicit NotDeadlocked(int q)
        : Error("counterstrategy state " + std::to_string(q) + " is not deadlocked") {}
};

class StateSpaceTooLarge : public Error {
public:
    using Error::Error;
};

class SpecRealizable : public Error {
public:
    SpecRealizable() : Error("specification is realizable; no counterstrategy exists") {}
};

class GoalNotPrevented : public Error {
public:
    explicit GoalNotPrevented(int k)
        : Error("goal " + std::to_string(k) + " is not prevented by any counterstrategy state") {}
};

class DepthExhausted : public Error {
public:
    explicit DepthExhausted(int d)
        : Error("no unsatisfiable unrolling up to depth " + std::to_string(d)) {}
};

class NotUnsatAtDepth : public Error {
public:
    explicit NotUnsatAtDepth(int d)
        : Error("goal unrolling is satisfiable at depth " + std::to_string(d) +
                "; the depth may be too small for the goal to matter or the goal is reachable") {}
};

class NotUnsynthesizable : public Error {
public:
    NotUnsynthesizable()
        : Error("reduced specification anchored at the bad initial state is synthesizable") {}
};

class SessionNotFound : public Error {
public:
    explicit SessionNotFound(const std::string& id) : Error("no session '" + id + "'") {}
};

class MalformedMove : public Error {
public:
    using Error::Error;
};

// Wall-clock budget shared by the SAT solver and the game fixpoints.
class Budget {
public:
    Budget() = default;
    explicit Budget(std::chrono::milliseconds limit)
        : enabled_(true), deadline_(std::chrono::steady_clock::now() + limit) {}

    static Budget unlimited() { return {}; }

    void check(const char* phase) const {
        if (enabled_ && std::chrono::steady_clock::now() > deadline_) throw AnalysisTimeout(phase);
    }

private:
    bool enabled_ = false;
    std::chrono::steady_clock::time_point deadline_{};
};

} // namespace gr1core
