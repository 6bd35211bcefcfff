#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace marol {

struct SourcePos {
    int line = 0;
    int col = 0;
};

// Syntax-level failure in a Marol program, circuit, or arch file.
class ParseError : public std::runtime_error {
public:
    ParseError(SourcePos pos, const std::string& msg)
        : std::runtime_error(format(pos, msg)), pos_(pos) {}
    SourcePos pos() const { return pos_; }

private:
    static std::string format(SourcePos pos, const std::string& msg) {
        if (pos.line <= 0) return msg;
        return std::to_string(pos.line) + ":" + std::to_string(pos.col) + ": " + msg;
    }
    SourcePos pos_;
};

struct TypeDiag {
    SourcePos pos;
    std::string message;
};

class TypeErrors : public std::runtime_error {
public:
    explicit TypeErrors(std::vector<TypeDiag> diags)
        : std::runtime_error(join(diags)), diags_(std::move(diags)) {}
    const std::vector<TypeDiag>& diags() const { return diags_; }

private:
    static std::string join(const std::vector<TypeDiag>& diags) {
        std::string out;
        for (const auto& d : diags) {
            if (!out.empty()) out += "\n";
            if (d.pos.line > 0)
                out += std::to_string(d.pos.line) + ":" + std::to_string(d.pos.col) + ": ";
            out += d.message;
        }
        return out;
    }
    std::vector<TypeDiag> diags_;
};

// Evaluation got stuck (bad index, missing key, fuel exhausted, ...).
class EvalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Input files that parse but violate load-time constraints.
class LoadError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace marol
