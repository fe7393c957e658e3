import asyncio
import sys


def print_usage():
    """Print usage information for the script."""
    print("One-loop parametric integrals and coactions")
    print("\nUsage:")
    print("  python main.py cli <subcommand> [options]")
    print("\nModes:")
    print("  cli <subcommand>      Run the command-line interface")
    print("\nCLI Subcommands:")
    print("  symanzik              Symanzik polynomials of a graph")
    print("  coaction              Coaction of a box, triangle or bubble")
    print("  eval                  Quadrature and closed-form values")
    print("  verify                Identity checks (exit code 2 on failure)")
    print("  reduce                Reduction to boxes")
    print("  relations             Integer relations among logarithms")
    print("  graded                Weight-graded dimensions")
    print("\nExamples:")
    print("  python main.py cli coaction --graph=builtin:box")
    print("  python main.py cli eval --graph=builtin:box --kinematics=uniform --method=both")
    print("  python main.py cli graded --n=5")
    print("\nFor more detailed help on CLI options, run:")
    print("  python main.py cli                   # Show available CLI subcommands")
    print("  python main.py cli eval --help       # Show options for the eval subcommand")


if __name__ == "__main__":
    if len(sys.argv) < 2:
        print_usage()
        sys.exit(0)

    mode = sys.argv[1].lower()
    if mode == "cli":
        # CLI mode - remove the mode argument for the CLI script
        sys.argv.pop(1)
        from cli import main_cli

        sys.exit(asyncio.run(main_cli()))
    else:
        print(f"Unknown mode: {mode}")
        print_usage()
        sys.exit(1)
