"""Toy inference entry point."""

def main():
    print("serving model from attested weights")

if __name__ == "__main__":
    main()
