#pragma once
// Error types shared by the whole pipeline. Every error carries its kind name
// as a prefix of what() so command-line users can see which contract failed.

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mcd {

class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& message)
        : std::runtime_error(kind + ": " + message), kind_(std::move(kind)) {}

    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

class SyntaxError : public Error {
public:
    SyntaxError(const std::string& message, std::size_t line, std::size_t column)
        : Error("SyntaxError", message + " at line " + std::to_string(line) + ", column " +
                                   std::to_string(column)),
          line_(line), column_(column) {}

    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

#define MCD_DEFINE_ERROR(Name)                                                  \
    class Name : public Error {                                                 \
    public:                                                                     \
        explicit Name(const std::string& message) : Error(#Name, message) {}    \
    }

MCD_DEFINE_ERROR(SchemaError);
MCD_DEFINE_ERROR(EmptyCorpus);
MCD_DEFINE_ERROR(DegenerateLabels);
MCD_DEFINE_ERROR(CorpusTooSmall);
MCD_DEFINE_ERROR(TooFewPoints);
MCD_DEFINE_ERROR(VocabMismatch);
MCD_DEFINE_ERROR(ConfigError);
MCD_DEFINE_ERROR(IoError);

#undef MCD_DEFINE_ERROR

// Rethrows `e` as the same kind with `context` prepended to its message.
[[noreturn]] inline void rethrow_with_context(const Error& e, const std::string& context) {
    const std::string msg = context + ": " + std::string(e.what()).substr(e.kind().size() + 2);
    if (dynamic_cast<const SchemaError*>(&e)) throw SchemaError(msg);
    if (dynamic_cast<const EmptyCorpus*>(&e)) throw EmptyCorpus(msg);
    if (dynamic_cast<const DegenerateLabels*>(&e)) throw DegenerateLabels(msg);
    if (dynamic_cast<const CorpusTooSmall*>(&e)) throw CorpusTooSmall(msg);
    if (dynamic_cast<const TooFewPoints*>(&e)) throw TooFewPoints(msg);
    if (dynamic_cast<const VocabMismatch*>(&e)) throw VocabMismatch(msg);
    if (dynamic_cast<const ConfigError*>(&e)) throw ConfigError(msg);
    if (dynamic_cast<const IoError*>(&e)) throw IoError(msg);
    throw Error(e.kind(), msg);
}

}  // namespace mcd
