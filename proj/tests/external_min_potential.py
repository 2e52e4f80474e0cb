#!/usr/bin/env python3
"""Test fixture speaking the external-potential wire protocol.

Modes:
  min        phi = min(wf)
  const V    phi = V
  malformed  reply with junk after the first request
  die N      exit after answering N requests
  sleep      never answer (timeout exercise)
"""
import json
import sys
import time


def main() -> None:
    mode = sys.argv[1] if len(sys.argv) > 1 else "min"
    arg = sys.argv[2] if len(sys.argv) > 2 else "0"
    json.loads(sys.stdin.readline())  # handshake
    answered = 0
    for line in sys.stdin:
        req = json.loads(line)
        if mode == "sleep":
            time.sleep(3600)
        if mode == "malformed":
            print("not json at all", flush=True)
            continue
        if mode == "die" and answered >= int(arg):
            sys.exit(1)
        if mode == "const":
            phi = float(arg)
        else:
            phi = float(min(req["wf"]))
        print(json.dumps({"id": req["id"], "phi": phi}), flush=True)
        answered += 1


if __name__ == "__main__":
    main()
