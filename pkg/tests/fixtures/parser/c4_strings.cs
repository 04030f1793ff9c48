using Sys = System;
using System.Threading.Tasks;

class C4 {
    string s = "using System.Fake;";
    void M() {
        var x = $"using {nameof(C4)};";
    }
}
