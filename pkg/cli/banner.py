"""ASCII banner for the arbvol CLI."""

BANNER = r"""
             _                 _
   __ _ _ __| |____   _____  | |
  / _` | '__| '_ \ \ / / _ \ | |
 | (_| | |  | |_) \ V / (_) || |
  \__,_|_|  |_.__/ \_/ \___/ |_|
"""

TAGLINE = "Arbitrage-volume phase transitions in random one-period markets"


def print_banner() -> None:
    """Print the banner and tagline."""
    print(BANNER)
    print(f"  {TAGLINE}")
    print()
