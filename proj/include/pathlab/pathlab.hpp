#pragma once

#include <pathlab/addrgen.hpp>
#include <pathlab/experiment.hpp>
#include <pathlab/keccak.hpp>
#include <pathlab/keyspace.hpp>
#include <pathlab/model.hpp>
#include <pathlab/reference.hpp>
#include <pathlab/report.hpp>
#include <pathlab/stats.hpp>
#include <pathlab/trie.hpp>
