"""
Setup configuration for the S/I/Q epidemic toolkit.
"""
from setuptools import setup, find_packages

setup(
    name="siq-activity-epidemics",
    version="0.1.0",
    packages=find_packages(exclude=["tests", "tests.*", "examples", "examples.*"]),
    include_package_data=True,
    install_requires=[
        line.strip()
        for line in open("requirements.txt")
        if line.strip() and not line.startswith("#")
    ],
    entry_points={"console_scripts": ["siq=app.main:main"]},
    python_requires=">=3.10",
)
