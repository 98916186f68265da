// SPDX-License-Identifier: Apache-2.0
//
// beampred: multi-modal mmWave beam prediction toolkit
// Copyright (C) 2026 The beampred authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef BEAMPRED_ERROR_HPP
#define BEAMPRED_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace beampred
{
    // Failure categories; the CLI prints the category name as the first token of its error line
    enum class ErrorCategory
    {
        config,
        dimension,
        geometry,
        parse,
        io,
        prerequisite
    };

    constexpr std::string_view category_name(ErrorCategory c)
    {
        switch (c)
        {
        case ErrorCategory::config:
            return "config";
        case ErrorCategory::dimension:
            return "dimension";
        case ErrorCategory::geometry:
            return "geometry";
        case ErrorCategory::parse:
            return "parse";
        case ErrorCategory::io:
            return "io";
        case ErrorCategory::prerequisite:
            return "prerequisite";
        }
        return "unknown";
    }

    class Error : public std::runtime_error
    {
    public:
        Error(ErrorCategory category, const std::string &message)
            : std::runtime_error(message), category_(category) {}

        ErrorCategory category() const noexcept { return category_; }

    private:
        ErrorCategory category_;
    };

    struct ConfigError : Error
    {
        explicit ConfigError(const std::string &m) : Error(ErrorCategory::config, m) {}
    };

    struct DimensionError : Error
    {
        explicit DimensionError(const std::string &m) : Error(ErrorCategory::dimension, m) {}
    };

    struct GeometryError : Error
    {
        explicit GeometryError(const std::string &m) : Error(ErrorCategory::geometry, m) {}
    };

    struct ParseError : Error
    {
        explicit ParseError(const std::string &m) : Error(ErrorCategory::parse, m) {}
    };

    struct IoError : Error
    {
        explicit IoError(const std::string &m) : Error(ErrorCategory::io, m) {}
    };

    struct PrerequisiteError : Error
    {
        explicit PrerequisiteError(const std::string &m) : Error(ErrorCategory::prerequisite, m) {}
    };
}

#endif
