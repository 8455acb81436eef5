from cli.commands import main

# -------------------------------------------------
# python main.py <subcommand> [--config PATH] [--seed U64] [--out DIR] ...
# -------------------------------------------------
if __name__ == "__main__":
    main()
