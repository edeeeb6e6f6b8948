/*
    Licensed under the Apache License, Version 2.0 (the "License");
    you may not use this file except in compliance with the License.
    You may obtain a copy of the License at

        https://www.apache.org/licenses/LICENSE-2.0

    Unless required by applicable law or agreed to in writing, software
    distributed under the License is distributed on an "AS IS" BASIS,
    WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
    See the License for the specific language governing permissions and
    limitations under the License.
*/
#ifndef DSTREAM_CORE_ERROR_HPP_
#define DSTREAM_CORE_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <string_view>

namespace dstream {

enum class ErrorCode {
    // workflow construction
    kDuplicateNode,
    kUnknownNode,
    kUnknownPort,
    kChainWithoutOutput,
    kMissingStrategy,
    kInvalidOperation,
    kValidationFailed,
    // callbacks
    kUnknownCallback,
    kCallbackFailed,
    kMetadataMissing,
    // runtime
    kDeployHookFailed,
    kProcessHookFailed,
    kInvalidWorkerRef,
    kUnknownRole,
    kOutsideHook,
    kUnknownOutPort,
    kNodeHasInPorts,
    kTimeout,
    kZeroRecords,
    kZeroElapsed,
    // configuration
    kInvalidConfig,
    kUnknownStrategy,
    kMissingCallback,
    kInvalidQuery,
    kProtocolViolation,
};

std::string_view to_string(ErrorCode code);

/// Base of every error raised by the library. Carries a machine-checkable code.
class Error : public std::runtime_error {
  public:
    Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
    ErrorCode code() const noexcept { return code_; }

  private:
    ErrorCode code_;
};

}// namespace dstream

#endif// DSTREAM_CORE_ERROR_HPP_
