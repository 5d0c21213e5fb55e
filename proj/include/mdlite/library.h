#ifndef MDLITE_LIBRARY_H
#define MDLITE_LIBRARY_H

/* Flat C interface to engine instances.
 *
 * Instances are addressed by integer handles; 0 is never a valid handle.
 * No call terminates the host process: failures set the instance's error
 * slot (or, for calls without a usable handle, a per-thread global slot
 * read through handle 0) and return a failure status.
 *
 * The error slot is reset at the start of every call except
 * mdlite_has_error and mdlite_get_last_error. mdlite_get_last_error
 * clears the slot it reads.
 */

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef int64_t mdlite_handle;

enum { MDLITE_OK = 0, MDLITE_FAILED = 1 };

enum mdlite_value_kind {
  MDLITE_VALUE_NONE = 0,
  MDLITE_VALUE_INT = 1,
  MDLITE_VALUE_REAL = 2,
  MDLITE_VALUE_BOOL = 3,
  MDLITE_VALUE_STRING = 4,
  /* `reals[0..count)` */
  MDLITE_VALUE_REALS = 5
};

typedef struct mdlite_value {
  int kind;
  int64_t integer;
  double real;
  double reals[6];
  int count;
  char text[64];
} mdlite_value;

typedef struct mdlite_error {
  int has_error;
  char code[32];
  char message[1024];
  /* Multi-line caret rendering, as the command-line tool prints it. */
  char rendered[4096];
} mdlite_error;

/* Recognized flags:
 *   -log <path>|none          log file (default none)
 *   -echo none|screen|log|both
 *   -screen stdout|none       thermo and messages (default none)
 *   -plugins yes|no           allow `plugin load` (default yes)
 *   -var <name> <value>       preset a string variable
 * Returns 0 and sets the global error E-BAD-FLAG on anything else. */
mdlite_handle mdlite_open(int argc, const char* const* argv);

/* Idempotent; unknown or already closed handles are ignored. */
int mdlite_close(mdlite_handle h);

int mdlite_command(mdlite_handle h, const char* line);

/* Runs every logical line of `text` (continuations and comments allowed).
 * Stops at the first failing line. */
int mdlite_commands_string(mdlite_handle h, const char* text);

/* Handle 0 reads the calling thread's global slot. */
int mdlite_has_error(mdlite_handle h);
int mdlite_get_last_error(mdlite_handle h, mdlite_error* out);

/* Keys: natoms, step, dt, pe, ke, press, box (xlo xhi ylo yhi zlo zhi),
 * has_style(<name>), version. Energies are computed on a copy of the state
 * and never advance the simulation. Unknown keys fail with E-UNKNOWN-KEY. */
int mdlite_introspect(mdlite_handle h, const char* key, mdlite_value* out);

/* Per-atom arrays in atom-id order: x, v, f (reals, 3 columns), type and id
 * (integers, 1 column). Unsupported names fail with E-UNKNOWN-ARRAY. */
int mdlite_extract_shape(mdlite_handle h, const char* name, int64_t* rows, int* cols, int* is_integer);
/* `capacity` is in elements; fails with E-BAD-ARG if it is too small. */
int mdlite_extract_real(mdlite_handle h, const char* name, double* buffer, size_t capacity);
int mdlite_extract_int(mdlite_handle h, const char* name, int64_t* buffer, size_t capacity);

/* Binary restart image of the current state. Call with buffer == NULL to
 * learn the size through `size`. */
int mdlite_restart_bytes(mdlite_handle h, char* buffer, size_t capacity, size_t* size);

const char* mdlite_version(void);

#ifdef __cplusplus
}
#endif

#endif
