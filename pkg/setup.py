from setuptools import setup, find_packages

setup(
    name="adelic-gates",
    version="0.1.0",
    packages=find_packages(include=["adelic_gates", "adelic_gates.*"]),
    python_requires=">=3.9",
    install_requires=[
        "numpy",
        "sympy",
        "pydantic>=2",
        "tabulate",
    ],
    extras_require={
        'test': ['pytest'],
    },
    entry_points={
        'console_scripts': [
            'adelic-gates=adelic_gates.cli:main',
        ],
    },
)
