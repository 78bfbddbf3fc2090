#pragma once

#include <stdexcept>
#include <string>

namespace dnbody {

/// Base class for all library errors.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// -- system definition
struct NTooSmall : Error { using Error::Error; };
struct BadDimension : Error { using Error::Error; };
struct NonPositiveParameter : Error { using Error::Error; };

// -- modes / closed forms
struct WrongN : Error { using Error::Error; };

// -- numerical integration
struct NonFinite : Error { using Error::Error; };
struct Diverged : Error { using Error::Error; };

// -- resonance / design
struct NotCommensurate : Error { using Error::Error; };
struct Infeasible : Error { using Error::Error; };

// -- trace analysis
struct BadIndex : Error { using Error::Error; };
struct DegenerateDiameter : Error { using Error::Error; };

// -- scanning
struct CellCap : Error { using Error::Error; };

/// Scenario / request file syntax error with source location.
struct ParseError : Error {
    int line;
    int column;
    ParseError(int line_, int column_, const std::string& msg)
        : Error("line " + std::to_string(line_) + ", column " + std::to_string(column_) + ": " + msg),
          line(line_), column(column_) {}
};

} // namespace dnbody
