// SPDX-License-Identifier: Apache-2.0
//
// nflos: geometry-aided near-field LoS MIMO CSI acquisition and precoding
// Copyright (C) 2026 the nflos authors
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

#ifndef NFLOS_FIGURES_HPP
#define NFLOS_FIGURES_HPP

#include "nflos/config.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace nflos
{
    // Desk-scale reproduction recipes. Each figure may run several sub
    // configurations (labelled in the mode column) and appends them into the
    // same CSV.
    struct FigureStep
    {
        HarnessConfig cfg;
        std::string kind;
    };

    struct FigureRecipe
    {
        std::string name;
        std::vector<FigureStep> steps;
        std::vector<std::string> group_cols; // plot-data aggregation
        std::vector<std::string> value_cols;
    };

    std::vector<std::string> figure_names();
    FigureRecipe figure_recipe(const std::string &name, const HarnessConfig &base);

    // Runs all steps into `out` (single header; subsequent step headers are
    // dropped).
    void run_figure(const FigureRecipe &recipe, std::ostream &out);

} // namespace nflos

#endif
