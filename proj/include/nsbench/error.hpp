#pragma once

#include <stdexcept>
#include <string>

namespace nsbench {

// Base of every error the harness raises on purpose.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    using Error::Error;
};

class DuplicateIdError : public Error {
public:
    explicit DuplicateIdError(std::string id)
        : Error("duplicate doc_id: " + id), id_(std::move(id)) {}
    const std::string& id() const noexcept { return id_; }

private:
    std::string id_;
};

class NotFoundError : public Error {
public:
    using Error::Error;
};

class EmptyInputError : public Error {
public:
    using Error::Error;
};

class UndefinedScoreError : public Error {
public:
    using Error::Error;
};

class UndefinedMetricError : public Error {
public:
    using Error::Error;
};

class InfeasibleTargetsError : public Error {
public:
    InfeasibleTargetsError(std::string stratum, const std::string& what)
        : Error(what), stratum_(std::move(stratum)) {}
    const std::string& stratum() const noexcept { return stratum_; }

private:
    std::string stratum_;
};

// Dataset / run / corpus hashes disagree.
class IntegrityError : public Error {
public:
    using Error::Error;
};

} // namespace nsbench
