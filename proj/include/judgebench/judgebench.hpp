/*
 * Copyright 2026 The judgebench Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include "judgebench/cache.hpp"
#include "judgebench/chat_client.hpp"
#include "judgebench/cli.hpp"
#include "judgebench/consensus.hpp"
#include "judgebench/curation.hpp"
#include "judgebench/digest.hpp"
#include "judgebench/domain.hpp"
#include "judgebench/error.hpp"
#include "judgebench/losses.hpp"
#include "judgebench/metrics.hpp"
#include "judgebench/orchestrator.hpp"
#include "judgebench/prompts.hpp"
#include "judgebench/records.hpp"
#include "judgebench/report.hpp"
#include "judgebench/stub_server.hpp"
#include "judgebench/verdict_parser.hpp"
