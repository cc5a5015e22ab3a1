/* Copyright 2026 The xfsm Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *   http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef XFSM_H_
#define XFSM_H_

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(XFSM_BUILD_SHARED)
#define XFSM_API __attribute__((visibility("default")))
#else
#define XFSM_API
#endif

typedef struct xfsm_switch xfsm_switch;

/* Status codes. Values are stable. */
typedef enum {
  XFSM_OK = 0,
  XFSM_E_FRAME_TOO_SHORT = 1,
  XFSM_E_MALFORMED_HEADER = 2,
  XFSM_E_FIELD_ABSENT = 3,
  XFSM_E_VALUE_OVERFLOW = 4,
  XFSM_E_NO_LABEL = 5,
  XFSM_E_WIDTH_MISMATCH = 6,
  XFSM_E_TABLE_FULL = 7,
  XFSM_E_INVALID_PATTERN = 8,
  XFSM_E_UNKNOWN_HANDLE = 9,
  XFSM_E_INVALID_SCOPE = 10,
  XFSM_E_INCOMPATIBLE_SCOPES = 11,
  XFSM_E_NO_DEFAULT_ENTRY = 12,
  XFSM_E_UNKNOWN_ACTION = 13,
  XFSM_E_INVALID_ENTRY = 14,
  XFSM_E_UNKNOWN_TABLE = 15,
  XFSM_E_UNKNOWN_METER = 16,
  XFSM_E_STATE_TABLE_NOT_EMPTY = 17,
  XFSM_E_TRUNCATED = 18,
  XFSM_E_BAD_COMMAND = 19,
  XFSM_E_BAD_LENGTH = 20,
  XFSM_E_BAD_MESSAGE = 21,
  XFSM_E_SCHEMA = 22,
  XFSM_E_INVALID_ARGUMENT = 23,
  XFSM_E_IO = 24,
  XFSM_E_INTERNAL = 255
} xfsm_status;

typedef enum { XFSM_FORMAT_JSON = 0, XFSM_FORMAT_TEXT = 1 } xfsm_format;

/* Name of a status code, e.g. "BadLength". */
XFSM_API const char *xfsm_status_name(xfsm_status status);

/* Message of the last failed call on this thread; "" after success. */
XFSM_API const char *xfsm_last_error(void);

/* Releases strings and buffers returned through out-parameters. */
XFSM_API void xfsm_free(void *ptr);

/* An empty switch: tables are added with xfsm_switch_add_table and filled
   through control messages. */
XFSM_API xfsm_status xfsm_switch_create(uint32_t num_ports, xfsm_switch **out);
XFSM_API xfsm_status xfsm_switch_add_table(xfsm_switch *sw, uint8_t table_id,
                                           int stateful);

/* Builds and activates a switch from a YAML or JSON program. */
XFSM_API xfsm_status xfsm_switch_load_program(const char *path,
                                              xfsm_switch **out);
XFSM_API xfsm_status xfsm_switch_parse_program(const char *text,
                                               xfsm_switch **out);
XFSM_API void xfsm_switch_destroy(xfsm_switch *sw);

/* Processes one frame. *verdict receives one log line (JSON or text). */
XFSM_API xfsm_status xfsm_switch_submit(xfsm_switch *sw, const uint8_t *frame,
                                        size_t len, uint32_t in_port,
                                        uint64_t ts_us, xfsm_format format,
                                        char **verdict);

/* Replays a JSON-lines trace given as text. *log receives one line per
   packet; *last_ts (optional) the final timestamp. */
XFSM_API xfsm_status xfsm_switch_run_trace(xfsm_switch *sw,
                                           const char *trace_text,
                                           xfsm_format format, char **log,
                                           uint64_t *last_ts);

/* Flow states live at now_us. JSON: an array of
   {table, scope, key_hex, state, timeout_us, to_state, age_us}. */
XFSM_API xfsm_status xfsm_switch_dump_state(xfsm_switch *sw, uint64_t now_us,
                                            xfsm_format format, char **out);

/* Applies one or more back-to-back control messages. Replies (features
   reply) are concatenated into *reply; *reply is NULL when there is none. */
XFSM_API xfsm_status xfsm_switch_apply_message(xfsm_switch *sw,
                                               const uint8_t *msg, size_t len,
                                               uint64_t now_us,
                                               uint8_t **reply,
                                               size_t *reply_len);

/* Stateful capability bit (1 << 4) when any table is stateful. */
XFSM_API xfsm_status xfsm_switch_capabilities(xfsm_switch *sw,
                                              uint32_t *capabilities);
XFSM_API xfsm_status xfsm_switch_table_config(xfsm_switch *sw,
                                              uint8_t table_id,
                                              uint32_t *config);

/* JSON description of a control message stream. */
XFSM_API xfsm_status xfsm_describe_messages(const uint8_t *msg, size_t len,
                                            char **json);

/* Program generators; *yaml receives the program text. */
XFSM_API xfsm_status xfsm_gen_mac_learning(uint32_t num_ports, int parametric,
                                           char **yaml);
XFSM_API xfsm_status xfsm_gen_mpls_learning(const uint32_t *edge_ports,
                                            size_t n_edge_ports,
                                            const uint32_t *switch_ids,
                                            size_t n_switch_ids,
                                            uint32_t self_id, char **yaml);
XFSM_API xfsm_status xfsm_gen_port_knocking(uint32_t num_ports,
                                            uint32_t server_port, char **yaml);
XFSM_API xfsm_status xfsm_gen_ddos(const char *const *destinations,
                                   size_t n_destinations, uint64_t stage1_rate,
                                   uint64_t stage1_burst, uint64_t stage2_rate,
                                   uint64_t stage2_burst, char **yaml);

typedef struct {
  const char *kind; /* "mac", "knock" or "ddos" */
  uint64_t seed;
  uint32_t ports;
  uint32_t hosts;
  uint64_t packets;
  uint64_t interval_us;
  uint32_t broadcast_permille;
  uint32_t move_permille;
} xfsm_trace_spec;

/* Fills *spec with the generator defaults. */
XFSM_API void xfsm_trace_spec_init(xfsm_trace_spec *spec);
XFSM_API xfsm_status xfsm_gen_trace(const xfsm_trace_spec *spec,
                                    char **jsonl);

/* Hazard model. schedule_json is either an array of per-port arrays of
   {cycle, flow} or an object with a "schedules" member. */
XFSM_API xfsm_status xfsm_hazard_simulate(const char *schedule_json,
                                          uint32_t num_ports,
                                          uint32_t latency, int strict,
                                          char **report_json);
XFSM_API xfsm_status xfsm_min_safe_ports(uint32_t latency, int strict,
                                         uint32_t *num_ports);

#ifdef __cplusplus
}
#endif

#endif /* XFSM_H_ */
