#!/usr/bin/env python3
"""
chodim - volume contraction lab for the hyperbolic Cahn-Hilliard-Oono equation

Convenience launcher for running from a source checkout:
    python main.py dimension --config config/default.json --out runs/default
"""

from chodim.main import main

if __name__ == "__main__":
    raise SystemExit(main())
